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

"""
Analytical cost model and empirical scaling measurements.

A message-passing backbone with K layers over a graph with n nodes, m edges
and feature width f costs ``O(Kmf)`` for aggregation and ``O(nf²)`` for the
dense transforms per epoch. `measure_scaling()` checks the exponents
empirically by timing rounds on a grid that varies one of n, m or f.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
from scipy import stats

from mmfederation import (
    AggregatorConfig,
    AggregatorKind,
    FederationConfig,
    NodeClassification,
    init_clients,
    init_server,
    run_round,
)
from mmgraph import (
    ClientShard,
    Modality,
    MultimodalGraph,
    canonicalize,
    derive_seed,
    make_rng,
)
from mmnn import Architecture, ModelSpec, OptimizerConfig, OptimizerKind
from mmpartition import ScenarioConfig, build_scenario

from .config import ScalingConfig
from .errors import InvalidCostModel, ScalingGridError
from .log import log

__all__ = (
    "CostModel",
    "ScalingFit",
    "ScalingResult",
    "fit_scaling",
    "measure_scaling",
    "random_graph",
)

MIN_GRID_POINTS = 3
CONFIDENCE = 0.95


@dataclass(frozen=True)
class CostModel:
    """
    Symbolic per-round cost counters of one run.

    Attributes
    ----------
    layers: `int`
        Message-passing layers K.
    num_nodes: `int`
        Nodes n over all clients.
    num_edges: `int`
        Edges m over all clients.
    feature_dim: `int`
        Widest dense transform f.
    aux_dim: `int`
        Width F of the output layer.
    embedding_dim: `int`
        Embedding width h, the width of a prototype.
    num_classes: `int`
        Class count c.
    queries: `int`
        Extra dense n² passes q; zero for every built-in algorithm.
    sparse_builds: `int`
        Sparse adjacency constructions E, one per client.
    clients: `int`
        Client count.
    """

    layers: int
    num_nodes: int
    num_edges: int
    feature_dim: int
    aux_dim: int
    embedding_dim: int
    num_classes: int
    queries: int = 0
    sparse_builds: int = 0
    clients: int = 1

    def __post_init__(self) -> None:
        negative = {k: v for k, v in asdict(self).items() if v < 0}
        if negative:
            raise InvalidCostModel(f"Cost counters can't be negative: {negative}")

    @classmethod
    def from_spec(
        cls, spec: ModelSpec, shards: Sequence[ClientShard], num_classes: int
    ) -> CostModel:
        if spec.architecture is Architecture.MMGCN:
            input_width = max(m.feature_dim for m in spec.modalities)
        else:
            input_width = spec.input_dim
        return cls(
            layers=len(spec.hidden) if spec.propagates else 0,
            num_nodes=sum(s.graph.num_nodes for s in shards),
            num_edges=sum(s.graph.num_edges for s in shards),
            feature_dim=max(input_width, *spec.hidden),
            aux_dim=spec.output_dim,
            embedding_dim=spec.embedding_dim,
            num_classes=num_classes,
            sparse_builds=len(shards) if spec.propagates else 0,
            clients=len(shards),
        )

    @staticmethod
    def time_class(kind: AggregatorKind) -> str:
        # every built-in aggregator only adds O(P) vector work per client
        return "O(Kmf + nf²)"

    @staticmethod
    def space_class(kind: AggregatorKind) -> str:
        if kind is AggregatorKind.FEDPROTO:
            return "O(nf² + hc)"
        return "O(nf²)"

    @property
    def predicted_ops(self) -> int:
        """Multiply-adds of one epoch: ``K·m·f + n·f²``."""
        return (
            self.layers * self.num_edges * self.feature_dim
            + self.num_nodes * self.feature_dim**2
        )

    def to_dict(self, kind: AggregatorKind) -> Dict[str, Any]:
        return {
            "K": self.layers,
            "n": self.num_nodes,
            "m": self.num_edges,
            "f": self.feature_dim,
            "F": self.aux_dim,
            "h": self.embedding_dim,
            "c": self.num_classes,
            "q": self.queries,
            "E": self.sparse_builds,
            "clients": self.clients,
            "predicted_ops": self.predicted_ops,
            "time_class": self.time_class(kind),
            "space_class": self.space_class(kind),
        }


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares slope of ``log(time)`` on ``log(size)`` with its CI."""

    slope: float
    intercept: float
    stderr: float
    ci_low: float
    ci_high: float
    r_value: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class ScalingResult:
    variable: str
    values: Tuple[int, ...]
    times_ms: Tuple[float, ...]
    fit: ScalingFit

    def to_dict(self) -> Dict[str, Any]:
        return {
            "variable": self.variable,
            "values": list(self.values),
            "times_ms": list(self.times_ms),
            **self.fit.to_dict(),
        }


def fit_scaling(values: Sequence[float], times: Sequence[float]) -> ScalingFit:
    """
    Fit the empirical exponent of ``times`` against ``values`` on a log-log scale.

    Raises
    ------
    ScalingGridError
        With fewer than three distinct sizes or non-positive sizes or times.
    """
    x = np.asarray(values, dtype=np.float64)
    y = np.asarray(times, dtype=np.float64)
    if x.shape != y.shape:
        raise ScalingGridError(f"{x.size} sizes but {y.size} timings")
    if np.unique(x).size < MIN_GRID_POINTS:
        raise ScalingGridError(
            f"A scaling grid needs at least {MIN_GRID_POINTS} distinct sizes,"
            f" got {np.unique(x).size}"
        )
    if (x <= 0).any() or (y <= 0).any():
        raise ScalingGridError("Sizes and timings have to be positive")
    result = stats.linregress(np.log(x), np.log(y))
    slope = float(result.slope)
    stderr = float(result.stderr)
    half_width = float(stats.t.ppf((1 + CONFIDENCE) / 2, x.size - 2)) * stderr
    r_value = float(result.rvalue)
    return ScalingFit(
        slope=slope,
        intercept=float(result.intercept),
        stderr=stderr,
        ci_low=slope - half_width,
        ci_high=slope + half_width,
        r_value=0.0 if math.isnan(r_value) else r_value,
    )


def random_graph(
    num_nodes: int, num_edges: int, feature_dim: int, seed: int, num_classes: int = 2
) -> MultimodalGraph:
    """Uniform random graph with Gaussian features and uniform labels."""
    rng = make_rng(seed)
    edges = rng.integers(0, num_nodes, size=(num_edges, 2))
    return canonicalize(
        MultimodalGraph(
            num_nodes=num_nodes,
            edges=edges,
            modalities=(Modality("x", feature_dim),),
            features={"x": rng.standard_normal((num_nodes, feature_dim))},
            labels=rng.integers(0, num_classes, size=num_nodes),
            num_classes=num_classes,
        )
    )


def _grid_point(config: ScalingConfig, value: int) -> Tuple[int, int, int]:
    sizes = {
        "n": config.num_nodes,
        "m": config.num_edges,
        "f": config.feature_dim,
    }
    sizes[config.variable] = value
    return sizes["n"], sizes["m"], sizes["f"]


def _time_point(config: ScalingConfig, value: int, seed: int) -> float:
    num_nodes, num_edges, width = _grid_point(config, value)
    graph = random_graph(num_nodes, num_edges, width, derive_seed(seed, "graph", value))
    scenario = build_scenario(
        graph,
        ScenarioConfig(num_clients=config.num_clients, master_seed=seed),
    )
    task = NodeClassification()
    spec = ModelSpec(
        architecture=Architecture.GCN,
        modalities=graph.modalities,
        hidden=(width,),
        output_dim=graph.num_classes,
    )
    federation = FederationConfig(
        aggregator=AggregatorConfig(kind=config.algorithm.aggregator),
        optimizer=OptimizerConfig(kind=OptimizerKind.SGD),
    )
    server = init_server(spec, federation, task, config.num_clients, seed)
    clients = init_clients(server, scenario.shards, task)
    # the first round pays for allocations and is discarded
    timings = []
    for _ in range(config.repeats + 1):
        server, clients, record = run_round(server, clients, task)
        timings.append(record.wall_ms)
    return float(np.median(timings[1:]))


def measure_scaling(config: ScalingConfig, seed: int = 0) -> ScalingResult:
    """
    Time training rounds on every grid point and fit the scaling exponent.

    Each point builds a fresh random graph, runs ``repeats + 1`` rounds of a
    one-layer GCN and keeps the median round time of all rounds but the
    first. The fitted slope estimates the exponent of ``config.variable``.
    """
    if config.variable not in ("n", "m", "f"):
        raise ScalingGridError(f"Unknown scaling variable {config.variable!r}")
    if len(set(config.values)) < MIN_GRID_POINTS:
        raise ScalingGridError(
            f"A scaling grid needs at least {MIN_GRID_POINTS} distinct sizes,"
            f" got {len(set(config.values))}"
        )
    if config.repeats < 1:
        raise ScalingGridError("repeats has to be at least 1")
    times: List[float] = []
    for value in config.values:
        elapsed = _time_point(config, value, seed)
        log.info("Scaling %s=%s: %.2f ms per round", config.variable, value, elapsed)
        times.append(elapsed)
    fit = fit_scaling(config.values, times)
    log.info(
        "Scaling exponent of %s: %.3f (%.3f, %.3f)",
        config.variable,
        fit.slope,
        fit.ci_low,
        fit.ci_high,
    )
    return ScalingResult(config.variable, tuple(config.values), tuple(times), fit)
