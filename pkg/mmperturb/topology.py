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

"""Topology perturbations: count-preserving rewiring and uniform edge removal."""

from typing import List, NamedTuple, Set

import numpy as np

from mmgraph import MultimodalGraph, make_rng, round_half_up

from .errors import InvalidRatio
from .log import log

__all__ = ("MAX_RATIO", "RewireResult", "check_ratio", "edge_noise", "edge_sparsify")

#: Upper bound of the edge and label perturbation ratios.
MAX_RATIO = 0.9


def check_ratio(kind: str, ratio: float, high: float = MAX_RATIO) -> None:
    if not 0.0 <= ratio <= high:
        raise InvalidRatio(kind, ratio, 0.0, high)


class RewireResult(NamedTuple):
    graph: MultimodalGraph
    rewired: int
    skipped: int


def edge_noise(graph: MultimodalGraph, ratio: float, seed: int) -> RewireResult:
    """
    Rewire ``round(ratio * m)`` uniformly chosen edges.

    A rewired edge keeps one random endpoint and gets a new uniform partner
    among the nodes not adjacent to it, so the edge count never changes.
    An edge whose kept endpoint is adjacent to every other node stays as
    it is and counts as skipped.
    """
    check_ratio("edge_noise", ratio)
    count = round_half_up(ratio * graph.num_edges)
    if count == 0:
        return RewireResult(graph, 0, 0)
    rng = make_rng(seed)
    n = graph.num_nodes
    neighbours: List[Set[int]] = [set() for _ in range(n)]
    for u, v in graph.edges.tolist():
        neighbours[u].add(v)
        neighbours[v].add(u)
    edges = graph.edges.copy()
    chosen = np.sort(rng.choice(graph.num_edges, size=count, replace=False))
    skipped = 0
    for idx in chosen.tolist():
        u, v = (int(x) for x in edges[idx])
        keep, drop = (u, v) if rng.integers(2) == 0 else (v, u)
        blocked = np.fromiter(neighbours[keep] | {keep}, dtype=np.int64)
        candidates = np.setdiff1d(np.arange(n), blocked, assume_unique=True)
        if not candidates.size:
            skipped += 1
            continue
        new = int(rng.choice(candidates))
        neighbours[keep].discard(drop)
        neighbours[drop].discard(keep)
        neighbours[keep].add(new)
        neighbours[new].add(keep)
        edges[idx] = (min(keep, new), max(keep, new))
    if skipped:
        log.warning(
            "Skipped %s of %s rewirings, the graph has no free node pair left",
            skipped,
            count,
        )
    return RewireResult(graph.with_edges(edges), count - skipped, skipped)


def edge_sparsify(graph: MultimodalGraph, ratio: float, seed: int) -> MultimodalGraph:
    """Delete ``round(ratio * m)`` uniformly chosen edges."""
    check_ratio("edge_sparsify", ratio)
    count = round_half_up(ratio * graph.num_edges)
    if count == 0:
        return graph
    keep = make_rng(seed).choice(
        graph.num_edges, size=graph.num_edges - count, replace=False
    )
    return graph.with_edges(graph.edges[np.sort(keep)])
