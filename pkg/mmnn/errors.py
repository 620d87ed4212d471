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
    "NNException",
    "InvalidModelSpec",
    "LayoutMismatch",
    "ShapeMismatch",
    "EmptyMaskError",
    "NoPositiveEdges",
    "InvalidMaskFraction",
    "BatchTooSmall",
    "NonFiniteGradient",
)


class NNException(Exception):
    """Base exception class for mmnn."""


class InvalidModelSpec(NNException, ValueError):
    """Model specification has non-positive dims or an unusable modality set."""


class LayoutMismatch(NNException, ValueError):
    """Parameter vector doesn't follow the layout the model expects."""


class ShapeMismatch(NNException, ValueError):
    """Input arrays don't have the shapes the model or loss expects."""


class EmptyMaskError(NNException, ValueError):
    """Loss mask selects no node."""


class NoPositiveEdges(NNException, ValueError):
    """Link prediction loss got no positive edge."""


class InvalidMaskFraction(NNException, ValueError):
    """Masked reconstruction fraction is outside of (0, 1)."""


class BatchTooSmall(NNException, ValueError):
    """Contrastive loss needs at least two rows."""


class NonFiniteGradient(NNException, FloatingPointError):
    """
    Gradient holds NaN or infinite entries.

    Attributes
    ----------
    segment: `str`
        Name of the first parameter segment with a non-finite entry.
    count: `int`
        Total number of non-finite entries.
    """

    def __init__(self, segment: str, count: int) -> None:
        self.segment = segment
        self.count = count
        super().__init__(
            f"Gradient has {count} non-finite entries, first one in {segment!r}"
        )
