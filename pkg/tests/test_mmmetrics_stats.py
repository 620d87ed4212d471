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

import math

import numpy as np
import pytest
from conftest import build_graph

from mmgraph import UNLABELED, Modality, MultimodalGraph, canonicalize
from mmmetrics import (
    CIDER_SCALE,
    EmptyCorpusError,
    InvalidMetricArgument,
    MissingLabelsError,
    NoEdgesError,
    bleu,
    cider,
    client_topology_disparity,
    edge_homophily,
    feature_histograms,
    feature_kl,
    lcs_length,
    ngrams,
    rouge_l,
    tokenize,
    topology_stats,
)
from mmpartition import shards_from_assignment

REFERENCE = tokenize("The cat sat on the mat")


def test_tokenize_and_ngrams() -> None:
    assert REFERENCE == ["the", "cat", "sat", "on", "the", "mat"]
    assert ngrams(REFERENCE, 1)[("the",)] == 2
    assert ngrams(REFERENCE, 7) == {}


def test_bleu() -> None:
    assert bleu(REFERENCE, REFERENCE) == pytest.approx(1.0)
    short = tokenize("the cat sat on")
    assert bleu(short, REFERENCE) == pytest.approx(math.exp(1 - 6 / 4))
    # no 4-gram to match
    assert bleu(tokenize("the cat sat"), REFERENCE) == 0.0
    assert bleu(tokenize("dogs bark at night"), REFERENCE) == 0.0
    assert bleu([], REFERENCE) == 0.0
    assert bleu(tokenize("the cat"), REFERENCE, max_n=1) == pytest.approx(
        math.exp(1 - 6 / 2)
    )
    with pytest.raises(InvalidMetricArgument):
        bleu(REFERENCE, REFERENCE, max_n=0)


def test_rouge_l() -> None:
    assert lcs_length(list("abcd"), list("acde")) == 3
    assert rouge_l(list("abcd"), list("acde")) == pytest.approx(0.75)
    assert rouge_l(REFERENCE, REFERENCE) == pytest.approx(1.0)
    assert rouge_l(list("ab"), list("cd")) == 0.0
    assert rouge_l([], REFERENCE) == 0.0


def test_cider() -> None:
    other = tokenize("a dog ran in the park")
    corpus = [REFERENCE, other]
    assert cider(REFERENCE, [REFERENCE], corpus) == pytest.approx(CIDER_SCALE)
    assert cider(tokenize("birds fly south"), [REFERENCE], corpus) == 0.0
    # n-grams found in every document carry no weight
    assert cider(REFERENCE, [REFERENCE]) == 0.0
    partial = cider(tokenize("the cat sat on a rug"), [REFERENCE], corpus)
    assert 0.0 < partial < CIDER_SCALE
    with pytest.raises(EmptyCorpusError):
        cider(REFERENCE, [])
    with pytest.raises(EmptyCorpusError):
        cider(REFERENCE, [REFERENCE], corpus=[])


def test_edge_homophily(triangle_pair: MultimodalGraph) -> None:
    assert edge_homophily(triangle_pair) == 1.0
    bridged = triangle_pair.with_edges(np.vstack([triangle_pair.edges, [(2, 3)]]))
    assert edge_homophily(bridged) == pytest.approx(6 / 7)


def test_edge_homophily_skips_unlabeled_nodes() -> None:
    graph = build_graph(
        4, [(0, 1), (1, 2), (2, 3)], labels=[0, 0, UNLABELED, 1], num_classes=2
    )
    assert edge_homophily(graph) == 1.0
    with pytest.raises(NoEdgesError):
        edge_homophily(graph.with_edges(np.array([(1, 2)])))
    with pytest.raises(MissingLabelsError):
        edge_homophily(build_graph(2, [(0, 1)]))


def test_topology_stats_of_a_star() -> None:
    stats = topology_stats(build_graph(5, [(0, 1), (0, 2), (0, 3), (0, 4)]))
    assert stats.num_edges == 4
    assert stats.degree_mean == pytest.approx(1.6)
    assert stats.degree_var == pytest.approx(1.44)
    assert stats.degree_max == 4
    assert stats.density == pytest.approx(0.4)
    np.testing.assert_allclose(stats.centrality, [1.0, 0.25, 0.25, 0.25, 0.25])
    assert set(stats.to_dict()) == {
        "num_nodes",
        "num_edges",
        "degree_mean",
        "degree_var",
        "degree_max",
        "density",
    }


def test_topology_stats_of_a_single_node() -> None:
    stats = topology_stats(build_graph(1, []))
    assert stats.density == 0.0
    assert stats.centrality.tolist() == [0.0]


def test_client_topology_disparity() -> None:
    graph = build_graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5)])
    shards = shards_from_assignment(graph, np.array([0, 0, 0, 1, 1, 1]), 2, seed=0)
    disparity = client_topology_disparity(shards)
    assert disparity.degree_mean_std == pytest.approx(1 / 3)
    assert disparity.degree_mean_range == pytest.approx(2 / 3)
    assert disparity.density_std == pytest.approx(1 / 6)


def _single_feature_graph(num_nodes: int) -> MultimodalGraph:
    return build_graph(num_nodes, [], modalities=(Modality("x", 1),), seed=3)


def test_feature_kl_grows_with_feature_skew() -> None:
    graph = _single_feature_graph(400)
    values = graph.features["x"][:, 0]
    iid = shards_from_assignment(graph, np.arange(400) % 2, 2, seed=0)
    skewed_assignment = (values > np.median(values)).astype(np.int64)
    skewed = shards_from_assignment(graph, skewed_assignment, 2, seed=0)
    low, high = feature_kl(iid), feature_kl(skewed)
    assert (low.per_client >= 0).all()
    assert low.mean < 0.3 < high.mean
    assert np.diag(high.pairwise).tolist() == [0.0, 0.0]
    assert high.pairwise[0, 1] > high.mean


def test_feature_kl_skips_missing_modality() -> None:
    graph = build_graph(8, [])
    mask = np.ones((8, 2), dtype=bool)
    mask[:4, 1] = False
    graph = graph.with_modality_mask(mask)
    shards = shards_from_assignment(graph, np.repeat([0, 1], 4), 2, seed=0)
    hists = feature_histograms(shards, bins=4)
    assert hists.present["image"].tolist() == [False, True]
    assert hists.histograms["text"].shape == (2, 4, 4)
    np.testing.assert_allclose(hists.histograms["text"].sum(axis=2), 1.0)
    divergence = feature_kl(shards, bins=4)
    assert np.isfinite(divergence.per_client).all()
    assert np.isfinite(divergence.pairwise).all()


def test_constant_dimension_contributes_nothing() -> None:
    graph = canonicalize(
        MultimodalGraph(
            num_nodes=6,
            edges=np.zeros((0, 2), dtype=np.int64),
            modalities=(Modality("x", 1),),
            features={"x": np.ones((6, 1))},
        )
    )
    shards = shards_from_assignment(graph, np.arange(6) % 3, 3, seed=0)
    assert feature_histograms(shards).degenerate["x"].tolist() == [True]
    assert feature_kl(shards).per_client.tolist() == [0.0, 0.0, 0.0]


def test_histogram_arguments() -> None:
    shards = shards_from_assignment(_single_feature_graph(4), np.zeros(4, int), 1, 0)
    with pytest.raises(InvalidMetricArgument):
        feature_histograms(shards, bins=0)
    with pytest.raises(InvalidMetricArgument):
        feature_kl(shards, eps=0.0)
