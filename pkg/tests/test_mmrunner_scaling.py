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

from typing import List

import numpy as np
import pytest
from conftest import IMAGE, TEXT
from mmfederation import AggregatorKind
from mmgraph import MultimodalGraph
from mmnn import Architecture, ModelSpec
from mmpartition import ScenarioConfig, build_scenario
from mmrunner import (
    Algorithm,
    CostModel,
    InvalidCostModel,
    ScalingConfig,
    ScalingGridError,
    fit_scaling,
    measure_scaling,
    random_graph,
)

SIZES = [16, 32, 64, 128, 256]


@pytest.mark.parametrize("exponent", [1.0, 2.0, 0.5])
def test_fit_recovers_power_law(exponent: float) -> None:
    times = [3.0 * size**exponent for size in SIZES]
    fit = fit_scaling(SIZES, times)
    assert fit.slope == pytest.approx(exponent, abs=1e-9)
    assert fit.intercept == pytest.approx(np.log(3.0), abs=1e-9)
    assert fit.r_value == pytest.approx(1.0)
    assert fit.ci_low == pytest.approx(exponent, abs=1e-6)
    assert fit.ci_high == pytest.approx(exponent, abs=1e-6)


def test_constant_times_give_zero_slope() -> None:
    fit = fit_scaling(SIZES, [5.0] * len(SIZES))
    assert fit.slope == 0.0
    assert fit.stderr == 0.0
    assert np.isfinite(fit.r_value)


def test_confidence_interval_covers_noisy_slope() -> None:
    rng = np.random.default_rng(0)
    sizes = np.geomspace(10, 10_000, 12)
    times = sizes**1.5 * np.exp(rng.normal(0, 0.05, sizes.size))
    fit = fit_scaling(sizes, times)
    assert fit.ci_low < 1.5 < fit.ci_high
    assert fit.ci_low < fit.slope < fit.ci_high
    assert fit.to_dict()["slope"] == fit.slope


@pytest.mark.parametrize(
    "sizes, times",
    [
        ([16, 32], [1.0, 2.0]),
        ([16, 16, 32, 32], [1.0, 1.0, 2.0, 2.0]),
        ([0, 16, 32], [1.0, 2.0, 3.0]),
        ([8, 16, 32], [1.0, -2.0, 3.0]),
        ([8, 16, 32], [1.0, 2.0]),
    ],
)
def test_invalid_grids(sizes: List[float], times: List[float]) -> None:
    with pytest.raises(ScalingGridError):
        fit_scaling(sizes, times)


def test_cost_model_counts() -> None:
    cost = CostModel(
        layers=2,
        num_nodes=100,
        num_edges=300,
        feature_dim=16,
        aux_dim=3,
        embedding_dim=8,
        num_classes=3,
    )
    assert cost.predicted_ops == 2 * 300 * 16 + 100 * 16**2
    described = cost.to_dict(AggregatorKind.FEDAVG)
    assert described["q"] == 0
    assert described["predicted_ops"] == cost.predicted_ops
    assert described["space_class"] == "O(nf²)"
    assert CostModel.space_class(AggregatorKind.FEDPROTO) == "O(nf² + hc)"
    assert CostModel.time_class(AggregatorKind.SCAFFOLD) == "O(Kmf + nf²)"


def test_cost_model_rejects_negative_counters() -> None:
    with pytest.raises(InvalidCostModel):
        CostModel(
            layers=1,
            num_nodes=-1,
            num_edges=0,
            feature_dim=1,
            aux_dim=1,
            embedding_dim=1,
            num_classes=1,
        )


def test_cost_model_from_spec(small_sbm: MultimodalGraph) -> None:
    shards = build_scenario(small_sbm, ScenarioConfig(num_clients=3)).shards
    gcn = ModelSpec(Architecture.GCN, (TEXT, IMAGE), (8,), output_dim=3)
    cost = CostModel.from_spec(gcn, shards, 3)
    assert cost.layers == 1
    assert cost.feature_dim == 8
    assert cost.num_nodes == sum(s.graph.num_nodes for s in shards)
    assert cost.num_edges == sum(s.graph.num_edges for s in shards)
    assert cost.sparse_builds == cost.clients == 3

    mlp = ModelSpec(Architecture.MLP, (TEXT, IMAGE), (4,), output_dim=3)
    flat = CostModel.from_spec(mlp, shards, 3)
    assert flat.layers == flat.sparse_builds == 0
    assert flat.feature_dim == TEXT.feature_dim + IMAGE.feature_dim


def test_random_graph_shape() -> None:
    graph = random_graph(50, 120, 6, seed=1, num_classes=3)
    assert graph.num_nodes == 50
    assert graph.num_edges <= 120
    assert graph.features["x"].shape == (50, 6)
    assert set(graph.labels.tolist()) <= {0, 1, 2}
    again = random_graph(50, 120, 6, seed=1, num_classes=3)
    assert np.array_equal(graph.edges, again.edges)


def test_measure_scaling_times_every_point() -> None:
    config = ScalingConfig(
        variable="f",
        values=(4, 8, 16),
        num_nodes=40,
        num_edges=80,
        repeats=1,
        num_clients=2,
    )
    result = measure_scaling(config)
    assert result.values == (4, 8, 16)
    assert len(result.times_ms) == 3
    assert all(t > 0 for t in result.times_ms)
    described = result.to_dict()
    assert described["variable"] == "f"
    assert described["slope"] == result.fit.slope


def test_measure_scaling_with_scaffold() -> None:
    config = ScalingConfig(
        variable="n",
        values=(20, 40, 80),
        num_edges=60,
        feature_dim=4,
        repeats=1,
        algorithm=Algorithm.SCAFFOLD,
    )
    assert len(measure_scaling(config).times_ms) == 3


@pytest.mark.parametrize(
    "config",
    [
        ScalingConfig(variable="k"),
        ScalingConfig(values=(8, 16, 16)),
        ScalingConfig(repeats=0),
    ],
)
def test_invalid_scaling_configs(config: ScalingConfig) -> None:
    with pytest.raises(ScalingGridError):
        measure_scaling(config)


@pytest.mark.slow
def test_feature_width_dominates_round_time() -> None:
    config = ScalingConfig(
        variable="f",
        values=(64, 128, 256, 512),
        num_nodes=2000,
        num_edges=4000,
        repeats=2,
    )
    result = measure_scaling(config)
    assert result.fit.slope > 0.8
