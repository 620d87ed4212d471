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

import dataclasses
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import GraphStructureError
from .graph import UNLABELED, MultimodalGraph
from .seeding import make_rng, round_half_up

__all__ = (
    "DEFAULT_SPLIT",
    "Provenance",
    "SplitMasks",
    "ClientShard",
    "make_splits",
    "validate_shard_cover",
)

#: Train/val/test fractions of the labeled nodes.
DEFAULT_SPLIT: Tuple[float, float, float] = (0.6, 0.2, 0.2)


class Provenance(NamedTuple):
    scenario_hash: str
    partition_seed: int


class SplitMasks(NamedTuple):
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray


def make_splits(
    labels: Optional[np.ndarray],
    num_nodes: int,
    seed: int,
    fractions: Tuple[float, float, float] = DEFAULT_SPLIT,
) -> SplitMasks:
    """
    Split labeled nodes into disjoint train/val/test masks.

    Train and val sizes are ``round(fraction * L)`` of the L labeled nodes,
    test takes the rest. Unlabeled nodes belong to no split.
    """
    train = np.zeros(num_nodes, dtype=bool)
    val = np.zeros(num_nodes, dtype=bool)
    test = np.zeros(num_nodes, dtype=bool)
    if labels is None:
        return SplitMasks(train, val, test)

    labeled = np.flatnonzero(np.asarray(labels) != UNLABELED)
    order = make_rng(seed).permutation(labeled)
    total = order.size
    n_train = min(total, round_half_up(fractions[0] * total))
    n_val = min(total - n_train, round_half_up(fractions[1] * total))
    train[order[:n_train]] = True
    val[order[n_train : n_train + n_val]] = True
    test[order[n_train + n_val :]] = True
    return SplitMasks(train, val, test)


@dataclass(frozen=True, eq=False)
class ClientShard:
    """
    One client's private part of a partitioned graph.

    Attributes
    ----------
    client_id: `int`
        Client index in ``0..K-1``.
    node_global_ids: `numpy.ndarray`
        Global id of every local node (local id = position).
    graph: `MultimodalGraph`
        Local graph over the owned nodes.
    splits: `SplitMasks`
        Disjoint train/val/test masks over local nodes.
    provenance: `Provenance`
        Scenario hash and partition seed the shard was produced with.
    """

    client_id: int
    node_global_ids: np.ndarray
    graph: MultimodalGraph
    splits: SplitMasks
    provenance: Provenance

    def __post_init__(self) -> None:
        ids = np.array(self.node_global_ids, dtype=np.int64, copy=True).reshape(-1)
        ids.setflags(write=False)
        object.__setattr__(self, "node_global_ids", ids)
        n = self.graph.num_nodes
        if ids.size != n:
            raise GraphStructureError(
                f"Client {self.client_id} owns {ids.size} nodes"
                f" but its graph has {n}"
            )
        masks = [np.array(m, dtype=bool, copy=True) for m in self.splits]
        for mask in masks:
            if mask.shape != (n,):
                raise GraphStructureError("Split masks have to cover local nodes")
            mask.setflags(write=False)
        train, val, test = masks
        if (train & val).any() or (train & test).any() or (val & test).any():
            raise GraphStructureError("Split masks have to be disjoint")
        if self.graph.labels is not None:
            unlabeled = self.graph.labels == UNLABELED
            if ((train | val | test) & unlabeled).any():
                raise GraphStructureError("Split masks may only hold labeled nodes")
        elif (train | val | test).any():
            raise GraphStructureError("Split masks may only hold labeled nodes")
        object.__setattr__(self, "splits", SplitMasks(train, val, test))

    @property
    def num_nodes(self) -> int:
        return self.graph.num_nodes

    @property
    def num_samples(self) -> int:
        """Client sample count used as aggregation weight (size of train mask)."""
        return int(self.splits.train.sum())

    def with_graph(self, graph: MultimodalGraph) -> ClientShard:
        return dataclasses.replace(self, graph=graph)

    def with_splits(self, splits: SplitMasks) -> ClientShard:
        return dataclasses.replace(self, splits=splits)


def validate_shard_cover(shards: Sequence[ClientShard], num_nodes: int) -> None:
    """
    Check that client node sets are pairwise disjoint and cover every node.

    Raises
    ------
    GraphStructureError
        When a node is owned twice or not owned at all.
    """
    owners = np.zeros(num_nodes, dtype=np.int64)
    for shard in shards:
        ids = shard.node_global_ids
        if ids.size and (ids.min() < 0 or ids.max() >= num_nodes):
            raise GraphStructureError(
                f"Client {shard.client_id} owns nodes outside [0, {num_nodes})"
            )
        np.add.at(owners, ids, 1)
    if (owners > 1).any():
        raise GraphStructureError(
            f"{int((owners > 1).sum())} nodes are owned by more than one client"
        )
    if (owners == 0).any():
        raise GraphStructureError(
            f"{int((owners == 0).sum())} nodes are not owned by any client"
        )
