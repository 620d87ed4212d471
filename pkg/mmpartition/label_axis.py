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
Label-axis partitioners.

Each partitioner comes in two layers: an ``*_assignment()`` function that
maps every global node to a client id, and a ``partition_*()`` function that
turns the assignment into a `PartitionResult`.
"""

from typing import List, Optional, Tuple

import numpy as np

from mmgraph import (
    DEFAULT_SPLIT,
    UNLABELED,
    MultimodalGraph,
    Provenance,
    make_rng,
    validate_shard_cover,
)

from .errors import InsufficientLabelsError, InvalidClientCount, InvalidScenarioParams
from .log import log
from .louvain import louvain
from .result import PartitionResult, compute_axis_report, shards_from_assignment

__all__ = (
    "louvain_assignment",
    "balanced_greedy_assignment",
    "label_dirichlet_assignment",
    "label_iid_assignment",
    "partition_by_labels_louvain",
    "partition_balanced_greedy",
    "partition_label_dirichlet",
    "partition_label_iid",
    "dirichlet_proportions",
    "largest_remainder_counts",
)


def _check_clients(graph: MultimodalGraph, num_clients: int) -> None:
    if num_clients < 1 or num_clients > graph.num_nodes:
        raise InvalidClientCount(num_clients, graph.num_nodes)


def _require_labels(graph: MultimodalGraph) -> np.ndarray:
    if graph.labels is None:
        raise InsufficientLabelsError("Label-driven partitioning needs a labeled graph")
    return graph.labels


def dirichlet_proportions(
    concentration: float, size: int, rng: np.random.Generator
) -> np.ndarray:
    """
    Draw ``p ~ Dirichlet(concentration * 1_size)`` through gamma variates.

    Very small concentrations can underflow every gamma draw to zero,
    in which case one uniformly chosen component gets all the mass.
    """
    gammas = rng.standard_gamma(concentration, size)
    total = gammas.sum()
    if total <= 0 or not np.isfinite(total):
        proportions = np.zeros(size, dtype=np.float64)
        proportions[rng.integers(size)] = 1.0
        return proportions
    return gammas / total


def largest_remainder_counts(proportions: np.ndarray, total: int) -> np.ndarray:
    """Integer counts summing to ``total``; leftovers go to the largest remainders."""
    raw = proportions * total
    counts = np.floor(raw).astype(np.int64)
    leftover = total - int(counts.sum())
    if leftover > 0:
        # stable sort keeps the lowest index first among equal remainders
        order = np.argsort(-(raw - counts), kind="stable")
        counts[order[:leftover]] += 1
    return counts


def louvain_assignment(
    graph: MultimodalGraph, num_clients: int, seed: int
) -> np.ndarray:
    _check_clients(graph, num_clients)
    communities = louvain(graph)
    groups: List[np.ndarray] = [
        np.flatnonzero(communities == c) for c in range(int(communities.max()) + 1)
    ]
    rng = make_rng(seed)
    while len(groups) < num_clients:
        # split the largest group into two random halves
        idx = max(range(len(groups)), key=lambda i: (groups[i].size, -i))
        members = rng.permutation(groups.pop(idx))
        half = members.size // 2
        groups.append(np.sort(members[:half]))
        groups.append(np.sort(members[half:]))
    log.debug(
        "Louvain found %s communities for %s clients",
        int(communities.max()) + 1,
        num_clients,
    )

    # longest-processing-time bin packing
    order = sorted(range(len(groups)), key=lambda i: (-groups[i].size, groups[i][0]))
    loads = np.zeros(num_clients, dtype=np.int64)
    assignment = np.empty(graph.num_nodes, dtype=np.int64)
    for idx in order:
        client = int(np.argmin(loads))
        assignment[groups[idx]] = client
        loads[client] += groups[idx].size
    return assignment


def balanced_greedy_assignment(
    graph: MultimodalGraph, num_clients: int, seed: int
) -> np.ndarray:
    """
    Grow one region per client from a low-degree seed node.

    Each region absorbs the unassigned node with most links into it (ties go
    to a seeded random rank) until it reaches its target size of
    ``n // K`` or ``n // K + 1`` nodes.
    """
    _check_clients(graph, num_clients)
    n = graph.num_nodes
    adjacency = graph.adjacency
    degrees = graph.degrees
    rank = make_rng(seed).permutation(n)
    targets = np.full(num_clients, n // num_clients, dtype=np.int64)
    targets[: n % num_clients] += 1

    assignment = np.full(n, -1, dtype=np.int64)
    # start nodes: lowest degree first, seeded rank breaks ties
    start_order = np.lexsort((rank, degrees))
    for client in range(num_clients):
        links = np.zeros(n, dtype=np.int64)
        size = 0
        while size < targets[client]:
            candidates = (links > 0) & (assignment < 0)
            if candidates.any():
                key = np.where(candidates, links * (n + 1) + (n - rank), -1)
                node = int(np.argmax(key))
            else:
                node = int(next(s for s in start_order if assignment[s] < 0))
            assignment[node] = client
            size += 1
            row = adjacency.indices[adjacency.indptr[node] : adjacency.indptr[node + 1]]
            links[row] += 1
    return assignment


def label_dirichlet_assignment(
    graph: MultimodalGraph, num_clients: int, alpha: float, seed: int
) -> np.ndarray:
    if alpha <= 0:
        raise InvalidScenarioParams(f"alpha has to be positive, got {alpha}")
    labels = _require_labels(graph)
    _check_clients(graph, num_clients)
    labeled = graph.labeled_nodes()
    if labeled.size < num_clients:
        raise InsufficientLabelsError(
            f"{labeled.size} labeled nodes can't cover {num_clients} clients"
        )
    rng = make_rng(seed)
    assignment = np.full(graph.num_nodes, -1, dtype=np.int64)
    for c in range(graph.num_classes):
        members = rng.permutation(np.flatnonzero(labels == c))
        proportions = dirichlet_proportions(alpha, num_clients, rng)
        counts = largest_remainder_counts(proportions, members.size)
        bounds = np.concatenate([[0], np.cumsum(counts)])
        for client in range(num_clients):
            assignment[members[bounds[client] : bounds[client + 1]]] = client
    unlabeled = np.flatnonzero(labels == UNLABELED)
    assignment[unlabeled] = rng.integers(num_clients, size=unlabeled.size)

    sizes = np.bincount(assignment, minlength=num_clients)
    for client in np.flatnonzero(sizes == 0):
        donor = int(np.argmax(sizes))
        node = int(np.flatnonzero(assignment == donor)[-1])
        assignment[node] = client
        sizes[donor] -= 1
        sizes[client] += 1
        log.debug(
            "Moved node %s from client %s to empty client %s", node, donor, client
        )
    return assignment


def label_iid_assignment(
    graph: MultimodalGraph, num_clients: int, seed: int
) -> np.ndarray:
    labels = _require_labels(graph)
    _check_clients(graph, num_clients)
    rng = make_rng(seed)
    assignment = np.empty(graph.num_nodes, dtype=np.int64)
    pointer = 0
    # unlabeled nodes are dealt last, as one more group
    for c in [*range(graph.num_classes), UNLABELED]:
        members = rng.permutation(np.flatnonzero(labels == c))
        assignment[members] = (pointer + np.arange(members.size)) % num_clients
        pointer += members.size
    return assignment


def _result(
    graph: MultimodalGraph,
    assignment: np.ndarray,
    num_clients: int,
    seed: int,
    provenance: Optional[Provenance],
    fractions: Tuple[float, float, float],
) -> PartitionResult:
    shards = shards_from_assignment(
        graph,
        assignment,
        num_clients,
        seed,
        provenance=provenance,
        fractions=fractions,
    )
    validate_shard_cover(shards, graph.num_nodes)
    assignment = assignment.copy()
    assignment.setflags(write=False)
    return PartitionResult(shards, assignment, compute_axis_report(graph, shards))


def partition_by_labels_louvain(
    graph: MultimodalGraph,
    num_clients: int,
    seed: int,
    *,
    provenance: Optional[Provenance] = None,
    fractions: Tuple[float, float, float] = DEFAULT_SPLIT,
) -> PartitionResult:
    """
    Bin-pack Louvain communities into ``num_clients`` clients.

    While there are fewer communities than clients, the largest one is
    split in two. Communities are then placed largest first on the
    currently smallest client.
    """
    assignment = louvain_assignment(graph, num_clients, seed)
    return _result(graph, assignment, num_clients, seed, provenance, fractions)


def partition_balanced_greedy(
    graph: MultimodalGraph,
    num_clients: int,
    seed: int,
    *,
    provenance: Optional[Provenance] = None,
    fractions: Tuple[float, float, float] = DEFAULT_SPLIT,
) -> PartitionResult:
    assignment = balanced_greedy_assignment(graph, num_clients, seed)
    return _result(graph, assignment, num_clients, seed, provenance, fractions)


def partition_label_dirichlet(
    graph: MultimodalGraph,
    num_clients: int,
    alpha: float,
    seed: int,
    *,
    provenance: Optional[Provenance] = None,
    fractions: Tuple[float, float, float] = DEFAULT_SPLIT,
) -> PartitionResult:
    """
    Split every class between clients with ``Dirichlet(alpha)`` proportions.

    Small ``alpha`` concentrates each class on few clients. Unlabeled nodes
    go to uniformly random clients, and a client left empty takes one node
    from the largest client.
    """
    assignment = label_dirichlet_assignment(graph, num_clients, alpha, seed)
    return _result(graph, assignment, num_clients, seed, provenance, fractions)


def partition_label_iid(
    graph: MultimodalGraph,
    num_clients: int,
    seed: int,
    *,
    provenance: Optional[Provenance] = None,
    fractions: Tuple[float, float, float] = DEFAULT_SPLIT,
) -> PartitionResult:
    """
    Deal each shuffled class round-robin over the clients.

    The dealing position carries over from one class to the next, so every
    client ends up with ``floor`` or ``ceil`` of ``n_c / K`` nodes of each
    class and the client sizes differ by at most one.
    """
    assignment = label_iid_assignment(graph, num_clients, seed)
    return _result(graph, assignment, num_clients, seed, provenance, fractions)
