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
    "MetricsException",
    "EmptyInputError",
    "LengthMismatch",
    "SingleClassError",
    "NoPositivesError",
    "NoEdgesError",
    "MissingLabelsError",
    "EmptyCorpusError",
    "InvalidMetricArgument",
)


class MetricsException(Exception):
    """Base exception class for mmmetrics."""


class EmptyInputError(MetricsException, ValueError):
    """Metric got no samples."""


class LengthMismatch(MetricsException, ValueError):
    """Paired inputs have different lengths."""


class SingleClassError(MetricsException, ValueError):
    """Ranking metric needs both positive and negative samples."""


class NoPositivesError(MetricsException, ValueError):
    """Ranking metric needs at least one positive sample."""


class NoEdgesError(MetricsException, ValueError):
    """Graph metric needs at least one edge."""


class MissingLabelsError(MetricsException, ValueError):
    """Graph metric needs node labels."""


class EmptyCorpusError(MetricsException, ValueError):
    """Text metric got no reference document."""


class InvalidMetricArgument(MetricsException, ValueError):
    """Metric parameter is outside of its legal range."""
