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

import numpy as np
import pytest
from conftest import build_graph
from hypothesis import given, strategies as st

from mmgraph import (
    UNLABELED,
    ClientShard,
    GraphStructureError,
    Provenance,
    SplitMasks,
    derive_seed,
    induce_subgraph,
    make_rng,
    make_splits,
    round_half_up,
    validate_shard_cover,
)


def test_derive_seed_is_stable_and_key_sensitive() -> None:
    assert derive_seed(7, "scenario", 1) == derive_seed(7, "scenario", 1)
    assert derive_seed(7, "scenario", 1) != derive_seed(7, "scenario", 2)
    assert derive_seed(7, "ab", "c") != derive_seed(7, "a", "bc")
    assert 0 <= derive_seed(-1, "x") < 2**64


def test_make_rng_is_deterministic() -> None:
    a = make_rng(42).random(5)
    b = make_rng(42).random(5)
    np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize(
    "value, expected", [(0.5, 1), (1.5, 2), (2.5, 3), (2.49, 2), (0.0, 0)]
)
def test_round_half_up(value: float, expected: int) -> None:
    assert round_half_up(value) == expected


@given(st.integers(0, 200), st.integers(0, 2**32))
def test_splits_are_disjoint_and_sized(num_labeled: int, seed: int) -> None:
    labels = np.full(num_labeled + 5, UNLABELED)
    labels[:num_labeled] = 0
    splits = make_splits(labels, labels.size, seed)
    train, val, test = splits
    assert not (train & val).any() and not (train & test).any()
    assert not (val & test).any()
    assert not (train | val | test)[num_labeled:].any()
    assert int(train.sum()) == round_half_up(0.6 * num_labeled)
    assert abs(int(val.sum()) - 0.2 * num_labeled) <= 1
    assert int((train | val | test).sum()) == num_labeled


def test_splits_without_labels_are_empty() -> None:
    splits = make_splits(None, 4, 0)
    assert not any(mask.any() for mask in splits)


def _shard(client_id: int, ids: list, labels: list) -> ClientShard:
    graph = induce_subgraph(build_graph(6, [], labels=[0] * 6), ids)
    graph = graph.with_labels(np.asarray(labels), 2)
    return ClientShard(
        client_id=client_id,
        node_global_ids=np.asarray(ids),
        graph=graph,
        splits=make_splits(graph.labels, graph.num_nodes, client_id),
        provenance=Provenance("abc", 0),
    )


def test_shard_cover_ok() -> None:
    shards = [_shard(0, [0, 2, 4], [0, 1, 0]), _shard(1, [1, 3, 5], [1, 1, 0])]
    validate_shard_cover(shards, 6)


def test_shard_cover_detects_overlap_and_gaps() -> None:
    with pytest.raises(GraphStructureError):
        validate_shard_cover(
            [_shard(0, [0, 1, 2], [0] * 3), _shard(1, [2, 3, 4], [0] * 3)], 6
        )
    with pytest.raises(GraphStructureError):
        validate_shard_cover([_shard(0, [0, 1, 2], [0] * 3)], 6)


def test_shard_rejects_overlapping_masks() -> None:
    shard = _shard(0, [0, 1], [0, 1])
    mask = np.array([True, False])
    with pytest.raises(GraphStructureError):
        shard.with_splits(SplitMasks(mask, mask, np.zeros(2, dtype=bool)))


def test_shard_rejects_unlabeled_in_split() -> None:
    shard = _shard(0, [0, 1], [0, UNLABELED])
    empty = np.zeros(2, dtype=bool)
    with pytest.raises(GraphStructureError):
        shard.with_splits(SplitMasks(np.array([False, True]), empty, empty))


def test_num_samples_counts_train_nodes() -> None:
    shard = _shard(0, list(range(6)), [0, 1, 0, 1, 0, 1])
    assert shard.num_samples == int(shard.splits.train.sum()) == 4
