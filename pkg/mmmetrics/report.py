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

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Sequence, Union

import numpy as np

from .errors import EmptyInputError, InvalidMetricArgument

__all__ = ("CONVERGENCE_THRESHOLD", "MetricReport", "convergence_round")

#: Share of the best value a curve has to reach to count as converged.
CONVERGENCE_THRESHOLD = 0.995


def convergence_round(
    curve: Union[Sequence[float], np.ndarray], threshold: float = CONVERGENCE_THRESHOLD
) -> int:
    """1-indexed first round whose value reaches ``threshold * max(curve)``."""
    values = np.asarray(curve, dtype=np.float64).reshape(-1)
    if not values.size:
        raise EmptyInputError("Convergence round needs a non-empty curve")
    target = threshold * values.max()
    return int(np.flatnonzero(values >= target)[0]) + 1


@dataclass
class MetricReport:
    """
    Named scalar metrics with optional per-class breakdowns.

    `to_json()` flattens breakdowns into ``"<metric>.<class>"`` keys and
    sorts every key, so equal reports serialize to equal bytes.
    """

    values: Dict[str, float] = field(default_factory=dict)
    per_class: Dict[str, Sequence[float]] = field(default_factory=dict)
    metadata: Dict[str, str] = field(default_factory=dict)

    def add(self, name: str, value: float) -> None:
        value = float(value)
        if not math.isfinite(value):
            raise InvalidMetricArgument(f"Metric {name!r} is not finite: {value}")
        self.values[name] = value

    def add_per_class(self, name: str, values: Sequence[float]) -> None:
        self.per_class[name] = [float(v) for v in values]

    def update(self, values: Mapping[str, float]) -> None:
        for name, value in values.items():
            self.add(name, value)

    def __getitem__(self, name: str) -> float:
        return self.values[name]

    def __contains__(self, name: object) -> bool:
        return name in self.values

    def flat(self) -> Dict[str, Any]:
        data: Dict[str, Any] = dict(self.values)
        for name, values in self.per_class.items():
            for idx, value in enumerate(values):
                data[f"{name}.{idx}"] = value
        for key, value in self.metadata.items():
            data[f"meta.{key}"] = value
        return data

    def to_json(self) -> str:
        return json.dumps(self.flat(), sort_keys=True)
