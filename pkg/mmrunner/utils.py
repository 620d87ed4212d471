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

import contextlib
import os
from pathlib import Path
from typing import IO, Iterator, Union

__all__ = ("natural_size", "atomic_writer")

_BASE = 1000


def natural_size(value: Union[float, int]) -> str:
    """Human-readable byte count, e.g. ``natural_size(24280) == "24.28KB"``."""
    if value < _BASE:
        return f"{value}B"
    for power, suffix in enumerate("KMGTPEZY", 2):
        unit = _BASE**power
        if value < unit:
            return f"{_BASE * value / unit:.2f}{suffix}B"
    return f"{_BASE * value / unit:.2f}{suffix}B"


@contextlib.contextmanager
def atomic_writer(path: Union[str, Path]) -> Iterator[IO[str]]:
    """
    Write a text file through ``<name>.partial`` and rename it into place.

    The target only appears once the block exits cleanly. A failure leaves
    the partial file behind and the previous target untouched.
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    partial = target.with_name(target.name + ".partial")
    with partial.open("w", encoding="utf-8", newline="") as fp:
        yield fp
        fp.flush()
        os.fsync(fp.fileno())
    os.replace(partial, target)
