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
    "PerturbException",
    "InvalidRatio",
    "SingleClassError",
    "InvalidSweep",
    "MissingTargetModality",
)


class PerturbException(Exception):
    """Base exception class for mmperturb."""


class InvalidRatio(PerturbException, ValueError):
    """Perturbation ratio or noise level is outside of the kind's legal range."""

    def __init__(self, kind: str, value: float, low: float, high: float) -> None:
        self.kind = kind
        self.value = value
        super().__init__(f"{kind} needs a value in [{low}, {high}], got {value}")


class SingleClassError(PerturbException, ValueError):
    """Label noise needs at least two classes to flip between."""


class InvalidSweep(PerturbException, ValueError):
    """Sweep points don't share a kind or their ratios aren't ascending."""


class MissingTargetModality(PerturbException, ValueError):
    """Modality-missing perturbation without a target modality."""
