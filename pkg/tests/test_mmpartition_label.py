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

import itertools

import networkx as nx
import numpy as np
import pytest
from conftest import build_graph, sbm_dataset
from sklearn.metrics import adjusted_rand_score

from mmgraph import MultimodalGraph, make_rng
from mmpartition import (
    InsufficientLabelsError,
    InvalidClientCount,
    label_histogram,
    louvain,
    modularity,
    partition_balanced_greedy,
    partition_by_labels_louvain,
    partition_label_dirichlet,
    partition_label_iid,
)


def _nx(graph: MultimodalGraph) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(graph.num_nodes))
    g.add_edges_from(graph.edges.tolist())
    return g


def _client_sets(assignment: np.ndarray) -> set:
    return {
        frozenset(np.flatnonzero(assignment == c).tolist())
        for c in np.unique(assignment)
    }


def test_louvain_two_triangles(triangle_pair: MultimodalGraph) -> None:
    communities = louvain(triangle_pair)
    assert communities.tolist() == [0, 0, 0, 1, 1, 1]
    assert modularity(triangle_pair, communities) == pytest.approx(0.5)


def _best_modularity(graph: MultimodalGraph) -> float:
    best = -1.0
    g = _nx(graph)
    nodes = list(range(graph.num_nodes))
    # restricted growth strings enumerate every set partition once
    for labels in itertools.product(range(graph.num_nodes), repeat=graph.num_nodes):
        if any(labels[i] > max(labels[:i], default=-1) + 1 for i in nodes):
            continue
        parts = [
            {n for n in nodes if labels[n] == c} for c in range(max(labels) + 1)
        ]
        best = max(best, nx.algorithms.community.modularity(g, parts))
    return best


def test_louvain_reaches_max_modularity_on_two_triangles(
    triangle_pair: MultimodalGraph,
) -> None:
    found = modularity(triangle_pair, louvain(triangle_pair))
    assert found == pytest.approx(_best_modularity(triangle_pair))


def test_louvain_complete_graph_is_one_community() -> None:
    graph = build_graph(4, list(itertools.combinations(range(4), 2)))
    assert louvain(graph).tolist() == [0, 0, 0, 0]


def test_louvain_edgeless_graph_gives_singletons() -> None:
    assert louvain(build_graph(3, [])).tolist() == [0, 1, 2]


@pytest.mark.parametrize("seed", range(5))
def test_modularity_matches_networkx(seed: int) -> None:
    graph = sbm_dataset((15, 15), 0.3, 0.05, seed=seed)
    communities = make_rng(seed).integers(0, 3, size=graph.num_nodes)
    parts = [set(np.flatnonzero(communities == c).tolist()) for c in range(3)]
    parts = [part for part in parts if part]
    expected = nx.algorithms.community.modularity(_nx(graph), parts)
    assert modularity(graph, communities) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_louvain_beats_singleton_partition(seed: int) -> None:
    graph = sbm_dataset((20, 20), 0.2, 0.05, seed=seed)
    singletons = np.arange(graph.num_nodes)
    assert modularity(graph, louvain(graph)) >= modularity(graph, singletons)


@pytest.mark.slow
def test_louvain_recovers_sbm_blocks() -> None:
    for seed in range(10):
        graph = sbm_dataset((40, 40), 0.4, 0.01, seed=seed)
        assert adjusted_rand_score(graph.labels, louvain(graph)) > 0.9


def test_louvain_partition_single_client(small_sbm: MultimodalGraph) -> None:
    result = partition_by_labels_louvain(small_sbm, 1, seed=0)
    assert (result.assignment == 0).all()


def test_louvain_partition_keeps_triangles(triangle_pair: MultimodalGraph) -> None:
    result = partition_by_labels_louvain(triangle_pair, 2, seed=0)
    assert _client_sets(result.assignment) == {
        frozenset({0, 1, 2}),
        frozenset({3, 4, 5}),
    }


def test_louvain_partition_splits_communities_for_more_clients(
    triangle_pair: MultimodalGraph,
) -> None:
    result = partition_by_labels_louvain(triangle_pair, 4, seed=0)
    assert np.unique(result.assignment).tolist() == [0, 1, 2, 3]


@pytest.mark.slow
def test_louvain_partition_is_more_skewed_than_iid() -> None:
    louvain_tv, iid_tv = [], []
    for seed in range(10):
        graph = sbm_dataset((30, 30, 30), 0.3, 0.01, seed=seed)
        louvain_tv.append(
            partition_by_labels_louvain(graph, 2, seed).axis_report.mean_label_tv
        )
        iid_tv.append(partition_label_iid(graph, 2, seed).axis_report.mean_label_tv)
    assert np.mean(louvain_tv) > np.mean(iid_tv)


def test_balanced_greedy_on_path() -> None:
    graph = build_graph(4, [(0, 1), (1, 2), (2, 3)])
    result = partition_balanced_greedy(graph, 2, seed=0)
    assert _client_sets(result.assignment) == {frozenset({0, 1}), frozenset({2, 3})}


def test_balanced_greedy_singletons() -> None:
    graph = build_graph(5, [(0, 1), (1, 2)])
    result = partition_balanced_greedy(graph, 5, seed=3)
    assert sorted(result.assignment.tolist()) == [0, 1, 2, 3, 4]


@pytest.mark.parametrize("num_clients", [3, 7])
def test_balanced_greedy_sizes(small_sbm: MultimodalGraph, num_clients: int) -> None:
    sizes = np.bincount(partition_balanced_greedy(small_sbm, num_clients, 0).assignment)
    assert sizes.max() - sizes.min() <= 1


@pytest.mark.slow
def test_balanced_greedy_cuts_fewer_edges_than_random() -> None:
    n, k = 100, 4
    for seed in range(10):
        rng = make_rng(seed)
        graph = build_graph(n, np.argwhere(np.triu(rng.random((n, n)) < 0.05, k=1)))
        assignment = partition_balanced_greedy(graph, k, seed).assignment
        u, v = graph.edges[:, 0], graph.edges[:, 1]
        cut = int((assignment[u] != assignment[v]).sum())
        same_pairs = k * (n // k) * (n // k - 1)
        expected_random = graph.num_edges * (1 - same_pairs / (n * (n - 1)))
        assert cut <= expected_random


def test_too_many_clients(triangle_pair: MultimodalGraph) -> None:
    with pytest.raises(InvalidClientCount):
        partition_label_iid(triangle_pair, 7, 0)
    with pytest.raises(InvalidClientCount):
        partition_balanced_greedy(triangle_pair, 7, 0)


def test_label_iid_exact_divisibility() -> None:
    graph = build_graph(20, [], labels=[0] * 10 + [1] * 10)
    result = partition_label_iid(graph, 5, seed=1)
    assert (result.axis_report.label_histograms == 2).all()


def test_label_iid_single_client_keeps_histogram(small_sbm: MultimodalGraph) -> None:
    result = partition_label_iid(small_sbm, 1, seed=0)
    np.testing.assert_array_equal(
        result.axis_report.label_histograms[0],
        label_histogram(small_sbm.labels, small_sbm.num_classes),
    )


@pytest.mark.parametrize("seed", range(5))
def test_label_iid_counts_are_floor_or_ceil(seed: int) -> None:
    labels = [0] * 7 + [1] * 8 + [2] * 9
    graph = build_graph(len(labels), [], labels=labels)
    histograms = partition_label_iid(graph, 4, seed).axis_report.label_histograms
    for c, total in enumerate((7, 8, 9)):
        assert set(histograms[:, c].tolist()) <= {total // 4, -(-total // 4)}


def test_dirichlet_huge_alpha_is_almost_iid() -> None:
    graph = sbm_dataset((200, 200, 200), 0.01, 0.001)
    report = partition_label_dirichlet(graph, 4, 1e6, seed=0).axis_report
    assert report.label_tv.max() < 0.05


def test_dirichlet_single_client(small_sbm: MultimodalGraph) -> None:
    result = partition_label_dirichlet(small_sbm, 1, 0.1, seed=0)
    assert (result.assignment == 0).all()


def test_dirichlet_clients_are_never_empty(small_sbm: MultimodalGraph) -> None:
    for seed in range(10):
        result = partition_label_dirichlet(small_sbm, 10, 0.01, seed)
        assert all(shard.num_nodes > 0 for shard in result.shards)


def test_dirichlet_needs_enough_labels() -> None:
    graph = build_graph(3, [], labels=[0, -1, -1], num_classes=1)
    with pytest.raises(InsufficientLabelsError):
        partition_label_dirichlet(graph, 2, 1.0, 0)


@pytest.mark.slow
def test_dirichlet_small_alpha_concentrates_classes() -> None:
    labels = np.repeat(np.arange(10), 100)
    graph = build_graph(labels.size, [], labels=labels)
    shares = []
    for seed in range(20):
        histograms = partition_label_dirichlet(
            graph, 10, 0.1, seed
        ).axis_report.label_histograms
        totals = histograms.sum(axis=1)
        shares.append((histograms.max(axis=1)[totals > 0] / totals[totals > 0]).mean())
    assert np.mean(shares) > 0.5


@pytest.mark.slow
def test_dirichlet_skew_shrinks_with_alpha() -> None:
    labels = np.repeat(np.arange(5), 60)
    graph = build_graph(labels.size, [], labels=labels)
    means = []
    for alpha in (0.1, 1.0, 10.0, 1000.0):
        tvs = [
            partition_label_dirichlet(graph, 5, alpha, seed).axis_report.mean_label_tv
            for seed in range(20)
        ]
        means.append(np.mean(tvs))
    assert all(a >= b for a, b in zip(means, means[1:]))
