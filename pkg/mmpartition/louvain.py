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
Deterministic two-phase Louvain community detection.

Nodes are scanned in ascending id order, a node only moves for a strictly
positive modularity gain and ties between candidate communities go to the
lowest community id. Communities are renumbered by their smallest member.
"""

from typing import Dict, List

import numpy as np

from mmgraph import MultimodalGraph

from .errors import ModularityDecreased
from .log import log

__all__ = ("louvain", "modularity")

_EPS = 1e-12


class _Level:
    """Weighted graph of one aggregation level."""

    def __init__(self, num_nodes: int) -> None:
        self.num_nodes = num_nodes
        # neighbours without the node itself
        self.adj: List[Dict[int, float]] = [{} for _ in range(num_nodes)]
        # weight of edges folded into the node by aggregation, counted once
        self.loops = [0.0] * num_nodes

    def add_edge(self, u: int, v: int, weight: float) -> None:
        if u == v:
            self.loops[u] += weight
            return
        self.adj[u][v] = self.adj[u].get(v, 0.0) + weight
        self.adj[v][u] = self.adj[v].get(u, 0.0) + weight

    def degree(self, node: int) -> float:
        return sum(self.adj[node].values()) + 2.0 * self.loops[node]

    @property
    def total_weight(self) -> float:
        return sum(self.degree(node) for node in range(self.num_nodes)) / 2.0

    def modularity(self, communities: List[int]) -> float:
        m = self.total_weight
        if m == 0:
            return 0.0
        inside: Dict[int, float] = {}
        total: Dict[int, float] = {}
        for node in range(self.num_nodes):
            c = communities[node]
            total[c] = total.get(c, 0.0) + self.degree(node)
            inside[c] = inside.get(c, 0.0) + self.loops[node]
            for other, weight in self.adj[node].items():
                if communities[other] == c and other > node:
                    inside[c] += weight
        return sum(inside[c] / m - (total[c] / (2.0 * m)) ** 2 for c in total)

    def aggregate(self, communities: List[int]) -> "_Level":
        level = _Level(max(communities) + 1)
        for node in range(self.num_nodes):
            c = communities[node]
            level.loops[c] += self.loops[node]
            for other, weight in self.adj[node].items():
                if other > node:
                    level.add_edge(c, communities[other], weight)
        return level


def _renumber(communities: List[int]) -> List[int]:
    mapping: Dict[int, int] = {}
    for c in communities:
        if c not in mapping:
            mapping[c] = len(mapping)
    return [mapping[c] for c in communities]


def _local_moves(level: _Level) -> List[int]:
    communities = list(range(level.num_nodes))
    m = level.total_weight
    degrees = [level.degree(node) for node in range(level.num_nodes)]
    totals = list(degrees)
    quality = level.modularity(communities)
    passes = 0
    while True:
        moved = 0
        for node in range(level.num_nodes):
            current = communities[node]
            k_i = degrees[node]
            totals[current] -= k_i
            links: Dict[int, float] = {}
            for other, weight in level.adj[node].items():
                c = communities[other]
                links[c] = links.get(c, 0.0) + weight

            scale = k_i / (2.0 * m * m)
            stay = links.get(current, 0.0) / m - totals[current] * scale
            best, best_gain = current, stay
            for c in sorted(links):
                if c == current:
                    continue
                g = links[c] / m - totals[c] * scale
                # ascending scan, so equal gains keep the lowest id
                if g > best_gain + _EPS:
                    best, best_gain = c, g
            totals[best] += k_i
            if best != current:
                communities[node] = best
                moved += 1
        passes += 1
        new_quality = level.modularity(communities)
        log.debug(
            "Louvain pass %s: %s moves, modularity %.6f", passes, moved, new_quality
        )
        if new_quality < quality - 1e-9:
            raise ModularityDecreased(quality, new_quality)
        quality = new_quality
        if not moved:
            return _renumber(communities)


def louvain(graph: MultimodalGraph) -> np.ndarray:
    """
    Detect communities of the unweighted graph.

    Returns
    -------
    numpy.ndarray
        int64 community id per node, numbered ``0..c-1`` in order of each
        community's smallest node id. An edgeless graph puts every node
        in its own community.

    Raises
    ------
    ModularityDecreased
        When a local-move pass lowers modularity. This can't happen for
        a correct gain computation and signals a bug.
    """
    n = graph.num_nodes
    level = _Level(n)
    for u, v in graph.edges.tolist():
        level.add_edge(u, v, 1.0)
    membership = list(range(n))
    if graph.num_edges == 0:
        return np.arange(n, dtype=np.int64)

    while True:
        communities = _local_moves(level)
        if max(communities, default=-1) + 1 == level.num_nodes:
            break
        membership = [communities[c] for c in membership]
        level = level.aggregate(communities)
    return np.asarray(_renumber(membership), dtype=np.int64)


def modularity(graph: MultimodalGraph, communities: np.ndarray) -> float:
    """Newman modularity of a node partition of the unweighted graph."""
    m = graph.num_edges
    if m == 0:
        return 0.0
    communities = np.asarray(communities, dtype=np.int64)
    _, dense = np.unique(communities, return_inverse=True)
    u, v = graph.edges[:, 0], graph.edges[:, 1]
    inside = np.bincount(dense[u][dense[u] == dense[v]], minlength=dense.max() + 1)
    total = np.bincount(dense, weights=graph.degrees, minlength=dense.max() + 1)
    return float(np.sum(inside / m - (total / (2.0 * m)) ** 2))
