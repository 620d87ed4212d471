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

"""Robustness sweeps over perturbation ratios."""

from concurrent.futures import Executor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from mmgraph import ClientShard, derive_seed

from .errors import InvalidSweep
from .log import log
from .spec import PerturbSpec, apply_perturbation

__all__ = ("RunnerHook", "SweepPoint", "sweep")

#: ``(perturbed shards, seed) -> final metric`` of one experiment.
RunnerHook = Callable[[Sequence[ClientShard], int], float]


@dataclass(frozen=True)
class SweepPoint:
    ratio: float
    mean: float
    stderr: float
    values: Tuple[float, ...]

    def to_dict(self) -> Dict[str, object]:
        return {
            "ratio": self.ratio,
            "mean": self.mean,
            "stderr": self.stderr,
            "values": list(self.values),
        }


def _stderr(values: Sequence[float]) -> float:
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1) / np.sqrt(len(values)))


def sweep(
    base_shards: Sequence[ClientShard],
    specs: Sequence[PerturbSpec],
    runner_hook: RunnerHook,
    seeds: Sequence[int] = (0,),
    *,
    executor: Optional[Executor] = None,
) -> List[SweepPoint]:
    """
    Run one experiment per (ratio, seed) and reduce over seeds.

    Every point is perturbed fresh from ``base_shards``, never from a
    previous point. The perturbation seed of a point derives from the
    spec's seed and the experiment seed.

    Raises
    ------
    InvalidSweep
        When the specs mix kinds or their ratios aren't ascending.
    """
    if not specs:
        raise InvalidSweep("A sweep needs at least one point")
    if len({spec.kind for spec in specs}) != 1:
        raise InvalidSweep("Sweep points have to share one perturbation kind")
    ratios = [spec.ratio for spec in specs]
    if any(a > b for a, b in zip(ratios, ratios[1:])):
        raise InvalidSweep(f"Sweep ratios have to be ascending, got {ratios}")
    if not seeds:
        raise InvalidSweep("A sweep needs at least one seed")

    jobs = [(spec, seed) for spec in specs for seed in seeds]

    def run(job: Tuple[PerturbSpec, int]) -> float:
        spec, seed = job
        shards = apply_perturbation(
            base_shards, spec.with_seed(derive_seed(spec.seed, "sweep", seed))
        )
        return float(runner_hook(shards, seed))

    if executor is None:
        values = [run(job) for job in jobs]
    else:
        values = list(executor.map(run, jobs))

    points = []
    for idx, spec in enumerate(specs):
        chunk = values[idx * len(seeds) : (idx + 1) * len(seeds)]
        points.append(
            SweepPoint(
                ratio=spec.ratio,
                mean=float(np.mean(chunk)),
                stderr=_stderr(chunk),
                values=tuple(chunk),
            )
        )
        log.info(
            "%s at %s: %.4f +- %.4f",
            spec.kind.value,
            spec.ratio,
            points[-1].mean,
            points[-1].stderr,
        )
    return points
