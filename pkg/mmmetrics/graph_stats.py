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
from typing import Any, Dict, Sequence

import numpy as np

from mmgraph import UNLABELED, ClientShard, MultimodalGraph

from .errors import EmptyInputError, MissingLabelsError, NoEdgesError

__all__ = (
    "TopologyStats",
    "TopologyDisparity",
    "edge_homophily",
    "topology_stats",
    "client_topology_disparity",
)


def edge_homophily(graph: MultimodalGraph) -> float:
    """
    Fraction of edges whose endpoints share a label.

    Edges touching an unlabeled node are left out.

    Raises
    ------
    MissingLabelsError
        When the graph carries no labels.
    NoEdgesError
        When no edge joins two labeled nodes.
    """
    if graph.labels is None:
        raise MissingLabelsError("Edge homophily needs a labeled graph")
    u = graph.labels[graph.edges[:, 0]]
    v = graph.labels[graph.edges[:, 1]]
    labeled = (u != UNLABELED) & (v != UNLABELED)
    if not labeled.any():
        raise NoEdgesError("Edge homophily needs at least one labeled edge")
    return float(np.mean(u[labeled] == v[labeled]))


@dataclass(frozen=True, eq=False)
class TopologyStats:
    num_nodes: int
    num_edges: int
    degree_mean: float
    degree_var: float
    degree_max: int
    density: float
    centrality: np.ndarray

    def to_dict(self) -> Dict[str, Any]:
        return {
            "num_nodes": self.num_nodes,
            "num_edges": self.num_edges,
            "degree_mean": self.degree_mean,
            "degree_var": self.degree_var,
            "degree_max": self.degree_max,
            "density": self.density,
        }


def topology_stats(graph: MultimodalGraph) -> TopologyStats:
    """
    Degree statistics, degree centrality ``deg / (n - 1)`` and density
    ``2m / (n (n - 1))``. Graphs with at most one node get zero centrality
    and density.
    """
    n = graph.num_nodes
    degrees = graph.degrees.astype(np.float64)
    if n > 1:
        centrality = degrees / (n - 1)
        density = 2.0 * graph.num_edges / (n * (n - 1))
    else:
        centrality = np.zeros(n)
        density = 0.0
    return TopologyStats(
        num_nodes=n,
        num_edges=graph.num_edges,
        degree_mean=float(degrees.mean()) if n else 0.0,
        degree_var=float(degrees.var()) if n else 0.0,
        degree_max=int(degrees.max()) if n else 0,
        density=density,
        centrality=centrality,
    )


@dataclass(frozen=True)
class TopologyDisparity:
    """Spread across clients of local topology statistics (population std)."""

    degree_mean_std: float
    degree_var_std: float
    density_std: float
    degree_mean_range: float

    def to_dict(self) -> Dict[str, float]:
        return {
            "degree_mean_std": self.degree_mean_std,
            "degree_var_std": self.degree_var_std,
            "density_std": self.density_std,
            "degree_mean_range": self.degree_mean_range,
        }


def client_topology_disparity(shards: Sequence[ClientShard]) -> TopologyDisparity:
    if not shards:
        raise EmptyInputError("Topology disparity needs at least one client")
    stats = [topology_stats(shard.graph) for shard in shards]
    means = np.array([s.degree_mean for s in stats])
    return TopologyDisparity(
        degree_mean_std=float(means.std()),
        degree_var_std=float(np.std([s.degree_var for s in stats])),
        density_std=float(np.std([s.density for s in stats])),
        degree_mean_range=float(means.max() - means.min()),
    )
