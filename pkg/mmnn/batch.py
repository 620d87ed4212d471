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
from typing import Dict, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from mmgraph import UNLABELED, Modality, MultimodalGraph

from .errors import ShapeMismatch

__all__ = ("Batch", "make_batch", "normalize_adjacency")


def normalize_adjacency(graph: MultimodalGraph) -> sp.csr_matrix:
    """
    Symmetrically normalized adjacency with self-loops.

    Entry ``(u, v)`` is ``1 / sqrt(d_u * d_v)`` for every edge and for
    ``u == v``, where ``d`` is degree plus one.
    """
    n = graph.num_nodes
    a_tilde = graph.adjacency + sp.identity(n, dtype=np.float64, format="csr")
    inv_sqrt = 1.0 / np.sqrt(np.asarray(a_tilde.sum(axis=1)).reshape(-1))
    scale = sp.diags(inv_sqrt)
    return sp.csr_matrix(scale @ a_tilde @ scale)


@dataclass(frozen=True, eq=False)
class Batch:
    """
    Full-graph model input.

    Attributes
    ----------
    modalities: `tuple` of `Modality`
        Modalities in graph order.
    features: `dict`
        Modality name -> ``(n, d)`` matrix with masked rows zeroed.
    modality_mask: `numpy.ndarray`
        ``(n, M)`` presence matrix.
    adjacency: `scipy.sparse.csr_matrix`
        Normalized adjacency operator.
    labels: `numpy.ndarray`, optional
        Class per node, `mmgraph.UNLABELED` where unknown.
    edges: `numpy.ndarray`
        Positive edge pairs.
    """

    modalities: Tuple[Modality, ...]
    features: Dict[str, np.ndarray]
    modality_mask: np.ndarray
    adjacency: sp.csr_matrix
    labels: Optional[np.ndarray]
    edges: np.ndarray

    @property
    def num_nodes(self) -> int:
        return int(self.modality_mask.shape[0])

    def modality_input(self, name: str, dtype: type) -> np.ndarray:
        return self.features[name].astype(dtype, copy=False)

    def stacked_input(self, dtype: type) -> np.ndarray:
        if not self.modalities:
            return np.zeros((self.num_nodes, 0), dtype=dtype)
        return np.concatenate(
            [self.modality_input(m.name, dtype) for m in self.modalities], axis=1
        )

    def with_features(self, features: Dict[str, np.ndarray]) -> Batch:
        return dataclasses.replace(self, features=features)

    def with_modality_mask(self, mask: np.ndarray) -> Batch:
        features = {
            m.name: self.features[m.name] * mask[:, idx : idx + 1]
            for idx, m in enumerate(self.modalities)
        }
        return dataclasses.replace(self, features=features, modality_mask=mask)

    def with_adjacency(self, adjacency: sp.csr_matrix) -> Batch:
        return dataclasses.replace(self, adjacency=adjacency)

    def labeled_mask(self) -> np.ndarray:
        if self.labels is None:
            return np.zeros(self.num_nodes, dtype=bool)
        return self.labels != UNLABELED


def make_batch(graph: MultimodalGraph) -> Batch:
    mask = graph.modality_mask
    assert mask is not None, "mypy"
    features = {}
    for idx, modality in enumerate(graph.modalities):
        matrix = graph.features[modality.name]
        if matrix.shape[0] != graph.num_nodes:
            raise ShapeMismatch(f"Feature rows of {modality.name!r} don't match nodes")
        features[modality.name] = matrix * mask[:, idx : idx + 1]
    return Batch(
        modalities=graph.modalities,
        features=features,
        modality_mask=mask,
        adjacency=normalize_adjacency(graph),
        labels=graph.labels,
        edges=graph.edges,
    )
