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

"""Random graph topology generators."""

from typing import List

import numpy as np

from mmgraph import MultimodalGraph, canonicalize, make_rng

from .errors import LatentDimensionMismatch
from .log import log
from .params import RdpgParams, SbmParams

__all__ = ("generate_sbm", "generate_rdpg", "sample_edges")


def sample_edges(probabilities: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """
    Draw an undirected edge list from a symmetric edge probability matrix.

    Only the strict upper triangle is read. Every pair is an independent
    Bernoulli draw, taken in row-major order.
    """
    n = probabilities.shape[0]
    rows, cols = np.triu_indices(n, k=1)
    keep = rng.random(rows.shape[0]) < probabilities[rows, cols]
    return np.stack([rows[keep], cols[keep]], axis=1).astype(np.int64)


def generate_sbm(params: SbmParams) -> MultimodalGraph:
    """
    Sample a stochastic block model graph.

    Node ids are laid out block after block and node labels are the
    block ids. The returned graph has no modalities.
    """
    rng = make_rng(params.seed)
    sizes = params.block_sizes
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    chunks: List[np.ndarray] = []
    for a, size_a in enumerate(sizes):
        for b in range(a, len(sizes)):
            size_b = sizes[b]
            if a == b:
                rows, cols = np.triu_indices(size_a, k=1)
                p = params.intra_p
            else:
                rows, cols = np.divmod(np.arange(size_a * size_b), size_b)
                p = params.inter_p
            keep = rng.random(rows.shape[0]) < p
            chunks.append(
                np.stack([rows[keep] + offsets[a], cols[keep] + offsets[b]], axis=1)
            )
    edges = np.concatenate(chunks).astype(np.int64)
    labels = np.repeat(np.arange(len(sizes), dtype=np.int64), sizes)
    graph = canonicalize(
        MultimodalGraph(
            num_nodes=params.num_nodes,
            edges=edges,
            labels=labels,
            num_classes=len(sizes),
        )
    )
    log.debug(
        "Generated SBM graph: %s nodes, %s edges, %s blocks",
        graph.num_nodes,
        graph.num_edges,
        len(sizes),
    )
    return graph


def generate_rdpg(params: RdpgParams) -> MultimodalGraph:
    """
    Sample a random dot product graph.

    Pair ``(u, v)`` becomes an edge with probability ``clip(x_u . x_v, 0, 1)``.

    Raises
    ------
    LatentDimensionMismatch
        When the latent position matrix isn't ``(n, latent_dim)``.
    """
    positions = params.latent_positions
    if positions.ndim != 2 or positions.shape[1] != params.latent_dim:
        raise LatentDimensionMismatch(
            f"Latent positions have shape {positions.shape},"
            f" expected (n, {params.latent_dim})"
        )
    probabilities = np.clip(positions @ positions.T, 0.0, 1.0)
    edges = sample_edges(probabilities, make_rng(params.seed))
    graph = canonicalize(MultimodalGraph(num_nodes=positions.shape[0], edges=edges))
    log.debug(
        "Generated RDPG graph: %s nodes, %s edges", graph.num_nodes, graph.num_edges
    )
    return graph
