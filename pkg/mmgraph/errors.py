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

from pathlib import Path
from typing import Tuple, Union

__all__ = (
    "MMGraphException",
    "GraphStructureError",
    "InvalidNodeSelection",
    "BundleError",
    "BundleFileMissing",
    "BundleDimensionMismatch",
    "BundleTruncated",
    "BundleFormatError",
    "UnknownModality",
)


class MMGraphException(Exception):
    """Base exception class for mmgraph."""


class GraphStructureError(MMGraphException, ValueError):
    """Graph arrays violate the structural invariants of a multimodal graph."""


class InvalidNodeSelection(MMGraphException, ValueError):
    """Node selection contains duplicate or out-of-range ids."""


class BundleError(MMGraphException):
    """
    Base class for errors raised while reading a graph bundle.

    Attributes
    ----------
    path: `Path`
        Path of the offending file (or bundle directory).
    """

    def __init__(self, path: Union[str, Path], message: str) -> None:
        self.path = Path(path)
        super().__init__(f"{message} ({self.path})")


class BundleFileMissing(BundleError):
    """A file that the bundle layout requires does not exist."""

    def __init__(self, path: Union[str, Path]) -> None:
        super().__init__(path, "Bundle file is missing")


class BundleDimensionMismatch(BundleError):
    """Binary payload holds whole rows, but not as many columns as meta declares."""

    def __init__(
        self, path: Union[str, Path], *, expected_dim: int, actual_dim: int
    ) -> None:
        self.expected_dim = expected_dim
        self.actual_dim = actual_dim
        super().__init__(
            path,
            f"meta.json declares dimension {expected_dim}"
            f" but payload holds {actual_dim} columns",
        )


class BundleTruncated(BundleError):
    """Binary payload is shorter than meta.json requires and not row-aligned."""

    def __init__(
        self, path: Union[str, Path], *, expected_bytes: int, actual_bytes: int
    ) -> None:
        self.expected_bytes = expected_bytes
        self.actual_bytes = actual_bytes
        super().__init__(
            path,
            f"payload is truncated: expected {expected_bytes} bytes,"
            f" got {actual_bytes}",
        )


class BundleFormatError(BundleError):
    """meta.json or a text table of the bundle can't be parsed."""


class UnknownModality(MMGraphException, KeyError):
    """Modality name is not declared by the graph."""

    def __init__(self, name: str, known: Tuple[str, ...]) -> None:
        self.name = name
        self.known = known
        super().__init__(f"Unknown modality {name!r}, graph declares {list(known)}")

    def __str__(self) -> str:
        # KeyError would repr() the message
        return str(self.args[0])
