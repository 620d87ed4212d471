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

from typing import NamedTuple, Optional, Sequence, Tuple

from mmgraph import ClientShard, derive_seed
from mmsynth import TopologyFitParams, TopologyMethod, reconstruct_topology

from .log import log

__all__ = ("TopologyAxis", "apply_topology_axis")


class TopologyAxis(NamedTuple):
    """
    Topology-axis setting: keep the induced edges (``method`` None)
    or replace them with a reconstruction.
    """

    method: Optional[TopologyMethod] = None
    fit_params: TopologyFitParams = TopologyFitParams()

    @property
    def available(self) -> bool:
        return self.method is None


def apply_topology_axis(
    shards: Sequence[ClientShard], axis: TopologyAxis, seed: int
) -> Tuple[ClientShard, ...]:
    if axis.method is None:
        return tuple(shards)
    result = []
    for shard in shards:
        graph = shard.graph
        edges = reconstruct_topology(
            graph.labels,
            axis.method,
            axis.fit_params,
            derive_seed(seed, "topology", shard.client_id),
            num_classes=graph.num_classes,
        )
        result.append(shard.with_graph(graph.with_edges(edges)))
    log.debug(
        "Reconstructed %s topology: %s edges over %s clients",
        axis.method.value,
        sum(s.graph.num_edges for s in result),
        len(result),
    )
    return tuple(result)
