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

"""Flat parameter storage with a named segment table."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import LayoutMismatch

__all__ = ("Segment", "ParamLayout", "ParamVector")


class Segment(NamedTuple):
    name: str
    shape: Tuple[int, ...]
    offset: int

    @property
    def size(self) -> int:
        return int(np.prod(self.shape, dtype=np.int64))

    @property
    def end(self) -> int:
        return self.offset + self.size


@dataclass(frozen=True)
class ParamLayout:
    """
    Ordered segment table.

    Segments tile ``[0, size)`` in declaration order without gaps.
    """

    segments: Tuple[Segment, ...]

    def __post_init__(self) -> None:
        position = 0
        names = set()
        for segment in self.segments:
            if segment.offset != position:
                raise LayoutMismatch(
                    f"Segment {segment.name!r} starts at {segment.offset},"
                    f" expected {position}"
                )
            if segment.name in names:
                raise LayoutMismatch(f"Duplicate segment name {segment.name!r}")
            names.add(segment.name)
            position = segment.end

    @classmethod
    def from_shapes(cls, shapes: Sequence[Tuple[str, Tuple[int, ...]]]) -> ParamLayout:
        segments = []
        offset = 0
        for name, shape in shapes:
            segment = Segment(name, tuple(int(dim) for dim in shape), offset)
            segments.append(segment)
            offset = segment.end
        return cls(tuple(segments))

    def __iter__(self) -> Iterator[Segment]:
        return iter(self.segments)

    def __len__(self) -> int:
        return len(self.segments)

    @property
    def size(self) -> int:
        return self.segments[-1].end if self.segments else 0

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(segment.name for segment in self.segments)

    def segment(self, name: str) -> Segment:
        for segment in self.segments:
            if segment.name == name:
                return segment
        raise KeyError(name)

    def selection(self, predicate: Callable[[str], bool]) -> np.ndarray:
        """Boolean coordinate mask of the segments whose name passes ``predicate``."""
        mask = np.zeros(self.size, dtype=bool)
        for segment in self.segments:
            if predicate(segment.name):
                mask[segment.offset : segment.end] = True
        return mask

    @property
    def head_segments(self) -> Tuple[str, ...]:
        return tuple(name for name in self.names if name.startswith("head."))


@dataclass(eq=False)
class ParamVector:
    """
    Model parameters as one flat array plus the layout that names its parts.

    ``values`` is float32 for training and communication. Model code is
    dtype-agnostic, so a float64 copy can be used for gradient checks.
    """

    layout: ParamLayout
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values).reshape(-1)
        if self.values.shape[0] != self.layout.size:
            raise LayoutMismatch(
                f"Parameter array has {self.values.shape[0]} entries,"
                f" layout needs {self.layout.size}"
            )

    @classmethod
    def zeros(cls, layout: ParamLayout, dtype: type = np.float32) -> ParamVector:
        return cls(layout, np.zeros(layout.size, dtype=dtype))

    @property
    def size(self) -> int:
        return self.layout.size

    @property
    def dtype(self) -> np.dtype:
        return self.values.dtype

    @property
    def nbytes(self) -> int:
        return int(self.values.nbytes)

    def view(self, name: str) -> np.ndarray:
        segment = self.layout.segment(name)
        return self.values[segment.offset : segment.end].reshape(segment.shape)

    def copy(self) -> ParamVector:
        return ParamVector(self.layout, self.values.copy())

    def astype(self, dtype: type) -> ParamVector:
        return ParamVector(self.layout, self.values.astype(dtype))

    def zeros_like(self) -> ParamVector:
        return ParamVector(self.layout, np.zeros_like(self.values))

    def with_values(self, values: np.ndarray) -> ParamVector:
        return ParamVector(self.layout, values)

    def check_layout(self, expected: ParamLayout) -> None:
        if self.layout != expected:
            raise LayoutMismatch("Parameter layout doesn't match the model")

    def first_segment(self, mask: np.ndarray) -> Optional[str]:
        """Name of the first segment that has a True coordinate in ``mask``."""
        hits = np.flatnonzero(mask)
        if not hits.size:
            return None
        for segment in self.layout:
            if segment.offset <= hits[0] < segment.end:
                return segment.name
        return None
