# Copyright 2026 The MMFedGraph Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

__all__ = (
    "SynthException",
    "InvalidGeneratorParams",
    "EmptyBlockError",
    "LatentDimensionMismatch",
    "MissingLabelsError",
)


class SynthException(Exception):
    """Base exception class for mmsynth."""


class InvalidGeneratorParams(SynthException, ValueError):
    """Generator parameters are outside of their legal range."""


class EmptyBlockError(InvalidGeneratorParams):
    """SBM block list is empty or holds a non-positive block size."""


class LatentDimensionMismatch(InvalidGeneratorParams):
    """RDPG latent positions don't have the declared shape."""


class MissingLabelsError(SynthException):
    """Operation needs class labels that the graph doesn't carry."""
