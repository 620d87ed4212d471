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

from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from mmgraph import (
    DEFAULT_SPLIT,
    UNLABELED,
    ClientShard,
    MultimodalGraph,
    Provenance,
    derive_seed,
    induce_subgraph,
    make_splits,
)

__all__ = (
    "AxisReport",
    "PartitionResult",
    "compute_axis_report",
    "label_histogram",
    "shards_from_assignment",
)


def label_histogram(labels: Optional[np.ndarray], num_classes: int) -> np.ndarray:
    """Per-class node counts, unlabeled nodes ignored."""
    if labels is None or num_classes == 0:
        return np.zeros(num_classes, dtype=np.int64)
    return np.bincount(labels[labels != UNLABELED], minlength=num_classes)


def _total_variation(counts: np.ndarray, reference: np.ndarray) -> float:
    if counts.sum() == 0 or reference.sum() == 0:
        return 0.0
    difference = counts / counts.sum() - reference / reference.sum()
    return 0.5 * float(np.abs(difference).sum())


@dataclass(frozen=True, eq=False)
class AxisReport:
    """
    Per-axis statistics of a partitioned scenario.

    Attributes
    ----------
    label_histograms: `numpy.ndarray`
        ``(K, C)`` class counts per client.
    label_tv: `numpy.ndarray`
        Total-variation distance of every client's label distribution
        from the global one.
    modality_coverage: `numpy.ndarray`
        ``(K, M)`` fraction of client nodes that hold each modality.
    edge_counts: `numpy.ndarray`
        Edge count of every client graph.
    edge_retention: `numpy.ndarray`
        Fraction of each client's induced original edges that its graph keeps.
    global_edge_retention: `float`
        Fraction of all original edges that survive inside some client.
    """

    label_histograms: np.ndarray
    label_tv: np.ndarray
    modality_coverage: np.ndarray
    edge_counts: np.ndarray
    edge_retention: np.ndarray
    global_edge_retention: float

    @property
    def mean_label_tv(self) -> float:
        return float(self.label_tv.mean()) if self.label_tv.size else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label_histograms": self.label_histograms.tolist(),
            "label_tv": self.label_tv.tolist(),
            "modality_coverage": self.modality_coverage.tolist(),
            "edge_counts": self.edge_counts.tolist(),
            "edge_retention": self.edge_retention.tolist(),
            "global_edge_retention": self.global_edge_retention,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> AxisReport:
        return cls(
            label_histograms=np.asarray(data["label_histograms"], dtype=np.int64),
            label_tv=np.asarray(data["label_tv"], dtype=np.float64),
            modality_coverage=np.asarray(data["modality_coverage"], dtype=np.float64),
            edge_counts=np.asarray(data["edge_counts"], dtype=np.int64),
            edge_retention=np.asarray(data["edge_retention"], dtype=np.float64),
            global_edge_retention=float(data["global_edge_retention"]),
        )


def compute_axis_report(
    graph: MultimodalGraph, shards: Sequence[ClientShard]
) -> AxisReport:
    """Measure label skew, modality coverage and edge retention of ``shards``."""
    num_classes = graph.num_classes
    global_hist = label_histogram(graph.labels, num_classes)
    histograms = np.zeros((len(shards), num_classes), dtype=np.int64)
    tv = np.zeros(len(shards), dtype=np.float64)
    coverage = np.zeros((len(shards), graph.num_modalities), dtype=np.float64)
    edge_counts = np.zeros(len(shards), dtype=np.int64)
    retention = np.ones(len(shards), dtype=np.float64)
    original = graph.edge_set()
    kept_total = 0
    for k, shard in enumerate(shards):
        histograms[k] = label_histogram(shard.graph.labels, num_classes)
        tv[k] = _total_variation(histograms[k], global_hist)
        mask = shard.graph.modality_mask
        assert mask is not None, "mypy"
        if shard.num_nodes:
            coverage[k] = mask.mean(axis=0)
        edge_counts[k] = shard.graph.num_edges
        ids = shard.node_global_ids
        induced = induce_subgraph(graph, ids).edge_set()
        kept = sum(
            1
            for u, v in shard.graph.edge_set()
            if (min(ids[u], ids[v]), max(ids[u], ids[v])) in original
        )
        kept_total += kept
        if induced:
            retention[k] = kept / len(induced)
    return AxisReport(
        label_histograms=histograms,
        label_tv=tv,
        modality_coverage=coverage,
        edge_counts=edge_counts,
        edge_retention=retention,
        global_edge_retention=kept_total / len(original) if original else 1.0,
    )


@dataclass(frozen=True, eq=False)
class PartitionResult:
    """
    Client shards of one scenario.

    Attributes
    ----------
    shards: `tuple` of `ClientShard`
        One shard per client, ordered by client id.
    assignment: `numpy.ndarray`
        Owning client id of every global node.
    axis_report: `AxisReport`
        Statistics of the three scenario axes.
    """

    shards: Tuple[ClientShard, ...]
    assignment: np.ndarray
    axis_report: AxisReport

    @property
    def num_clients(self) -> int:
        return len(self.shards)


def shards_from_assignment(
    graph: MultimodalGraph,
    assignment: np.ndarray,
    num_clients: int,
    seed: int,
    *,
    provenance: Optional[Provenance] = None,
    fractions: Tuple[float, float, float] = DEFAULT_SPLIT,
) -> Tuple[ClientShard, ...]:
    """
    Cut the graph into one induced-subgraph shard per client.

    Local node order follows ascending global id. Split masks of client
    ``k`` are drawn with ``derive_seed(seed, "splits", k)``.
    """
    if provenance is None:
        provenance = Provenance(scenario_hash="", partition_seed=seed)
    shards = []
    for client_id in range(num_clients):
        ids = np.flatnonzero(assignment == client_id)
        local = induce_subgraph(graph, ids)
        splits = make_splits(
            local.labels,
            local.num_nodes,
            derive_seed(seed, "splits", client_id),
            fractions,
        )
        shards.append(
            ClientShard(
                client_id=client_id,
                node_global_ids=ids,
                graph=local,
                splits=splits,
                provenance=provenance,
            )
        )
    return tuple(shards)
