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


import json
from typing import List

import numpy as np
import pytest
from conftest import build_graph

from mmgraph import ClientShard, MultimodalGraph
from mmmetrics import (
    client_topology_disparity,
    edge_homophily,
    feature_kl,
    topology_stats,
)
from mmpartition import ScenarioConfig, build_scenario
from mmrunner import analyze_shards


@pytest.fixture
def shards(small_sbm: MultimodalGraph) -> List[ClientShard]:
    config = ScenarioConfig(num_clients=3, master_seed=0)
    return list(build_scenario(small_sbm, config).shards)


def test_report_holds_every_analysis(shards: List[ClientShard]) -> None:
    flat = analyze_shards(shards).flat()
    divergence = feature_kl(shards)
    assert flat["meta.kl_direction"] == "client||global"
    assert flat["meta.kl_bins"] == "32"
    assert flat["feature_kl_mean"] == pytest.approx(divergence.mean)
    for i in range(3):
        assert flat[f"feature_kl.{i}"] == pytest.approx(divergence.per_client[i])
        assert flat[f"feature_kl_pairwise.{i}.{i}"] == 0.0
        for j in range(3):
            expected = divergence.pairwise[i, j]
            assert flat[f"feature_kl_pairwise.{i}.{j}"] == pytest.approx(expected)

    for shard in shards:
        k = shard.client_id
        stats = topology_stats(shard.graph)
        assert flat[f"edge_homophily.{k}"] == pytest.approx(edge_homophily(shard.graph))
        assert flat[f"degree_mean.{k}"] == pytest.approx(stats.degree_mean)
        assert flat[f"density.{k}"] == pytest.approx(stats.density)
    disparity = client_topology_disparity(shards)
    assert flat["disparity.degree_mean_std"] == pytest.approx(disparity.degree_mean_std)
    assert flat["disparity.density_std"] == pytest.approx(disparity.density_std)


def test_report_serializes_to_flat_json(shards: List[ClientShard]) -> None:
    data = json.loads(analyze_shards(shards).to_json())
    assert all(not isinstance(value, (dict, list)) for value in data.values())
    assert list(data) == sorted(data)


def test_edgeless_clients_have_no_homophily(
    small_sbm: MultimodalGraph, shards: List[ClientShard]
) -> None:
    lonely = shards[1]
    assert lonely.graph.labels is not None
    edgeless = build_graph(
        lonely.num_nodes,
        [],
        labels=lonely.graph.labels.tolist(),
        num_classes=small_sbm.num_classes,
    )
    shards[1] = lonely.with_graph(edgeless)
    flat = analyze_shards(shards).flat()
    assert "edge_homophily.1" not in flat
    kept = [flat["edge_homophily.0"], flat["edge_homophily.2"]]
    assert flat["edge_homophily_mean"] == pytest.approx(np.mean(kept))
    assert flat["degree_mean.1"] == 0.0
