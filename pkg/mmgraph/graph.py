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
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Mapping, Optional, Sequence, Set, Tuple

import numpy as np
import scipy.sparse as sp

from .errors import GraphStructureError, InvalidNodeSelection, UnknownModality

__all__ = (
    "UNLABELED",
    "Modality",
    "MultimodalGraph",
    "canonicalize",
    "induce_subgraph",
)

#: Label value of a node without a class.
UNLABELED = -1

_MODALITY_NAME_RE = re.compile(r"^[A-Za-z0-9_.-]+$")


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Modality:
    name: str
    feature_dim: int

    def __post_init__(self) -> None:
        if not _MODALITY_NAME_RE.match(self.name):
            # the name ends up in bundle file names
            raise GraphStructureError(f"Invalid modality name: {self.name!r}")
        if self.feature_dim < 1:
            raise GraphStructureError(
                f"Modality {self.name!r} needs a positive feature_dim,"
                f" got {self.feature_dim}"
            )


@dataclass(frozen=True, eq=False)
class MultimodalGraph:
    """
    Undirected graph whose nodes carry one feature row per modality.

    Instances are immutable: every array is copied on construction
    and marked read-only. Use `canonicalize()` to obtain a graph
    that satisfies all structural invariants.

    Attributes
    ----------
    num_nodes: `int`
        Node ids are dense integers ``0..num_nodes-1``.
    edges: `numpy.ndarray`
        ``(m, 2)`` int64 array of node pairs.
    modalities: `tuple` of `Modality`
        Ordered modality descriptors.
    features: `dict`
        Modality name -> float32 matrix of shape ``(num_nodes, feature_dim)``.
    modality_mask: `numpy.ndarray`
        ``(num_nodes, num_modalities)`` bool matrix, True = modality present.
    labels: `numpy.ndarray`, optional
        int64 class id per node, `UNLABELED` for nodes without a class.
        None when the graph carries no labels at all.
    num_classes: `int`
        Number of classes C.
    """

    num_nodes: int
    edges: np.ndarray
    modalities: Tuple[Modality, ...] = ()
    features: Mapping[str, np.ndarray] = field(default_factory=dict)
    modality_mask: Optional[np.ndarray] = None
    labels: Optional[np.ndarray] = None
    num_classes: int = 0

    def __post_init__(self) -> None:
        n = int(self.num_nodes)
        if n < 0:
            raise GraphStructureError(f"num_nodes can't be negative, got {n}")
        object.__setattr__(self, "num_nodes", n)

        edges = np.array(self.edges, dtype=np.int64, copy=True).reshape(-1, 2)
        object.__setattr__(self, "edges", _frozen(edges))

        modalities = tuple(self.modalities)
        names = [m.name for m in modalities]
        if len(set(names)) != len(names):
            raise GraphStructureError(f"Duplicate modality names: {names}")
        object.__setattr__(self, "modalities", modalities)

        if set(self.features) != set(names):
            raise GraphStructureError(
                f"Feature matrices {sorted(self.features)}"
                f" don't match modalities {names}"
            )
        features: Dict[str, np.ndarray] = {}
        for modality in modalities:
            matrix = np.array(self.features[modality.name], dtype=np.float32, copy=True)
            if matrix.shape != (n, modality.feature_dim):
                raise GraphStructureError(
                    f"Feature matrix of {modality.name!r} has shape {matrix.shape},"
                    f" expected {(n, modality.feature_dim)}"
                )
            features[modality.name] = _frozen(matrix)
        object.__setattr__(self, "features", features)

        if self.modality_mask is None:
            mask = np.ones((n, len(modalities)), dtype=bool)
        else:
            mask = np.array(self.modality_mask, dtype=bool, copy=True)
            if mask.shape != (n, len(modalities)):
                raise GraphStructureError(
                    f"Modality mask has shape {mask.shape},"
                    f" expected {(n, len(modalities))}"
                )
        object.__setattr__(self, "modality_mask", _frozen(mask))

        num_classes = int(self.num_classes)
        if num_classes < 0:
            raise GraphStructureError("num_classes can't be negative")
        object.__setattr__(self, "num_classes", num_classes)
        if self.labels is not None:
            labels = np.array(self.labels, dtype=np.int64, copy=True).reshape(-1)
            if labels.shape != (n,):
                raise GraphStructureError(
                    f"Label vector has {labels.shape[0]} entries, expected {n}"
                )
            if labels.size and (
                labels.min() < UNLABELED or labels.max() >= num_classes
            ):
                raise GraphStructureError(
                    f"Labels have to be in range [0, {num_classes})"
                )
            object.__setattr__(self, "labels", _frozen(labels))

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    @property
    def num_modalities(self) -> int:
        return len(self.modalities)

    @property
    def modality_names(self) -> Tuple[str, ...]:
        return tuple(m.name for m in self.modalities)

    @property
    def is_labeled(self) -> bool:
        return self.labels is not None

    def modality_index(self, name: str) -> int:
        for idx, modality in enumerate(self.modalities):
            if modality.name == name:
                return idx
        raise UnknownModality(name, self.modality_names)

    def feature(self, name: str) -> np.ndarray:
        try:
            return self.features[name]
        except KeyError:
            raise UnknownModality(name, self.modality_names) from None

    def labeled_nodes(self) -> np.ndarray:
        if self.labels is None:
            return np.empty(0, dtype=np.int64)
        return np.flatnonzero(self.labels != UNLABELED)

    @cached_property
    def degrees(self) -> np.ndarray:
        return _frozen(np.bincount(self.edges.ravel(), minlength=self.num_nodes))

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """Symmetric binary adjacency matrix in CSR format."""
        n = self.num_nodes
        rows = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        cols = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        data = np.ones(rows.shape[0], dtype=np.float64)
        return sp.csr_matrix((data, (rows, cols)), shape=(n, n))

    def with_edges(self, edges: np.ndarray) -> MultimodalGraph:
        return canonicalize(dataclasses.replace(self, edges=edges))

    def with_labels(
        self, labels: Optional[np.ndarray], num_classes: Optional[int] = None
    ) -> MultimodalGraph:
        if num_classes is None:
            num_classes = self.num_classes
        return dataclasses.replace(self, labels=labels, num_classes=num_classes)

    def with_modality_mask(self, mask: np.ndarray) -> MultimodalGraph:
        # canonicalize zeroes the rows that the new mask hides
        return canonicalize(dataclasses.replace(self, modality_mask=mask))

    def with_features(
        self,
        features: Mapping[str, np.ndarray],
        modalities: Optional[Sequence[Modality]] = None,
        modality_mask: Optional[np.ndarray] = None,
    ) -> MultimodalGraph:
        if modalities is None:
            modalities = self.modalities
            if modality_mask is None:
                modality_mask = self.modality_mask
        return canonicalize(
            dataclasses.replace(
                self,
                modalities=tuple(modalities),
                features=dict(features),
                modality_mask=modality_mask,
            )
        )

    def edge_set(self) -> Set[Tuple[int, int]]:
        return {(int(u), int(v)) for u, v in self.edges}


def canonicalize(graph: MultimodalGraph) -> MultimodalGraph:
    """
    Return a graph that satisfies every invariant of `MultimodalGraph`.

    Self-loops are dropped, pairs are ordered so that ``u < v``, duplicates
    are merged and the edge list is sorted lexicographically. Feature rows
    hidden by the modality mask are zeroed. Node order never changes.

    Raises
    ------
    GraphStructureError
        When an edge references a node id outside ``0..num_nodes-1``.
    """
    n = graph.num_nodes
    edges = graph.edges
    if edges.size and (edges.min() < 0 or edges.max() >= n):
        raise GraphStructureError(
            f"Edge endpoints have to be in range [0, {n}),"
            f" got [{edges.min()}, {edges.max()}]"
        )
    low = np.minimum(edges[:, 0], edges[:, 1])
    high = np.maximum(edges[:, 0], edges[:, 1])
    keep = low != high
    pairs = np.stack([low[keep], high[keep]], axis=1)
    if pairs.shape[0]:
        pairs = np.unique(pairs, axis=0)
    else:
        pairs = np.empty((0, 2), dtype=np.int64)

    mask = graph.modality_mask
    assert mask is not None, "mypy"
    features: Dict[str, np.ndarray] = {}
    for idx, modality in enumerate(graph.modalities):
        matrix = graph.features[modality.name]
        hidden = ~mask[:, idx]
        if hidden.any() and matrix[hidden].any():
            matrix = matrix.copy()
            matrix[hidden] = 0.0
        features[modality.name] = matrix

    return MultimodalGraph(
        num_nodes=n,
        edges=pairs,
        modalities=graph.modalities,
        features=features,
        modality_mask=mask,
        labels=graph.labels,
        num_classes=graph.num_classes,
    )


def induce_subgraph(
    graph: MultimodalGraph, node_ids: Sequence[int] | np.ndarray
) -> MultimodalGraph:
    """
    Restrict the graph to ``node_ids``.

    Local id ``i`` of the returned graph is global node ``node_ids[i]``,
    and the kept edges are exactly those with both endpoints selected.

    Raises
    ------
    InvalidNodeSelection
        When ``node_ids`` contains duplicates or out-of-range ids.
    """
    ids = np.asarray(node_ids, dtype=np.int64).reshape(-1)
    n = graph.num_nodes
    if ids.size and (ids.min() < 0 or ids.max() >= n):
        raise InvalidNodeSelection(f"Node ids have to be in range [0, {n})")
    if np.unique(ids).size != ids.size:
        raise InvalidNodeSelection("Node ids have to be distinct")

    local = np.full(n, -1, dtype=np.int64)
    local[ids] = np.arange(ids.size, dtype=np.int64)
    local_u = local[graph.edges[:, 0]]
    local_v = local[graph.edges[:, 1]]
    keep = (local_u >= 0) & (local_v >= 0)

    mask = graph.modality_mask
    assert mask is not None, "mypy"
    return canonicalize(
        MultimodalGraph(
            num_nodes=ids.size,
            edges=np.stack([local_u[keep], local_v[keep]], axis=1),
            modalities=graph.modalities,
            features={name: matrix[ids] for name, matrix in graph.features.items()},
            modality_mask=mask[ids],
            labels=None if graph.labels is None else graph.labels[ids],
            num_classes=graph.num_classes,
        )
    )
