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

from typing import Iterable

__all__ = (
    "RunnerException",
    "ConfigError",
    "EmptyAxisError",
    "UnknownColumnError",
    "ScalingGridError",
    "InvalidCostModel",
    "ResultsError",
)


class RunnerException(Exception):
    """Base exception class for mmrunner."""


class ConfigError(RunnerException, ValueError):
    """Configuration file doesn't match the schema or holds illegal values."""


class EmptyAxisError(ConfigError):
    """A scenario matrix axis has no value."""

    def __init__(self, axis: str) -> None:
        self.axis = axis
        super().__init__(f"Matrix axis {axis!r} is empty")


class UnknownColumnError(RunnerException, KeyError):
    """Plot spec names a column that the results table doesn't have."""

    def __init__(self, column: str, available: Iterable[str]) -> None:
        self.column = column
        self.available = sorted(available)
        super().__init__(
            f"Unknown column {column!r}, available: {', '.join(self.available)}"
        )

    def __str__(self) -> str:
        return str(self.args[0])


class ScalingGridError(RunnerException, ValueError):
    """Scaling grid has fewer than three points or non-positive sizes."""


class InvalidCostModel(RunnerException, ValueError):
    """A cost model counter is negative."""


class ResultsError(RunnerException):
    """Results directory is missing a file or holds a malformed row."""
