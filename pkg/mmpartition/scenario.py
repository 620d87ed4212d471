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

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from mmgraph import (
    DEFAULT_SPLIT,
    MultimodalGraph,
    Provenance,
    derive_seed,
    validate_shard_cover,
)
from mmsynth import TopologyFitParams, TopologyMethod

from .errors import InvalidClientCount, InvalidScenarioParams
from .label_axis import (
    balanced_greedy_assignment,
    label_dirichlet_assignment,
    label_iid_assignment,
    louvain_assignment,
)
from .log import log
from .modality_axis import apply_modality_noniid
from .result import PartitionResult, compute_axis_report, shards_from_assignment
from .topology_axis import TopologyAxis, apply_topology_axis

__all__ = (
    "ModalityMode",
    "TopologyMode",
    "LabelMode",
    "ScenarioConfig",
    "label_assignment",
    "build_scenario",
)


class ModalityMode(Enum):
    IID = "iid"
    NONIID = "noniid"


class TopologyMode(Enum):
    AVAILABLE = "available"
    SBM = "sbm"
    RDPG = "rdpg"

    @property
    def method(self) -> Optional[TopologyMethod]:
        if self is TopologyMode.AVAILABLE:
            return None
        return TopologyMethod(self.value)


class LabelMode(Enum):
    IID = "iid"
    LOUVAIN = "louvain"
    BALANCED = "balanced"
    DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class ScenarioConfig:
    """
    One cell of the modality x topology x label scenario matrix.

    Attributes
    ----------
    modality: `ModalityMode`
        IID keeps every modality, NONIID masks with ``Dirichlet(modality_beta)``.
    topology: `TopologyMode`
        AVAILABLE keeps induced edges, SBM/RDPG reconstruct them.
    label: `LabelMode`
        Label-axis partitioner.
    num_clients: `int`
        Client count K.
    master_seed: `int`
        Seed every stage seed is derived from.
    """

    modality: ModalityMode = ModalityMode.IID
    topology: TopologyMode = TopologyMode.AVAILABLE
    label: LabelMode = LabelMode.IID
    num_clients: int = 10
    master_seed: int = 0
    modality_beta: float = 1.0
    label_alpha: float = 1.0
    topology_fit: TopologyFitParams = field(default_factory=TopologyFitParams)
    split: Tuple[float, float, float] = DEFAULT_SPLIT

    def __post_init__(self) -> None:
        if self.num_clients < 1:
            raise InvalidScenarioParams(
                f"num_clients has to be at least 1, got {self.num_clients}"
            )
        if self.modality_beta <= 0:
            raise InvalidScenarioParams(
                f"modality_beta has to be positive, got {self.modality_beta}"
            )
        if self.label_alpha <= 0:
            raise InvalidScenarioParams(
                f"label_alpha has to be positive, got {self.label_alpha}"
            )
        if len(self.split) != 3 or abs(sum(self.split) - 1.0) > 1e-9:
            raise InvalidScenarioParams(
                f"Split fractions have to sum to 1: {self.split}"
            )

    @property
    def topology_axis(self) -> TopologyAxis:
        return TopologyAxis(self.topology.method, self.topology_fit)

    @property
    def name(self) -> str:
        modality = self.modality.value
        if self.modality is ModalityMode.NONIID:
            modality += f"(beta={self.modality_beta:g})"
        label = self.label.value
        if self.label is LabelMode.DIRICHLET:
            label += f"(alpha={self.label_alpha:g})"
        return f"{modality}/{self.topology.value}/{label}"

    def digest(self) -> str:
        """Short stable hash of every field, stored in shard provenance."""
        payload = {
            "modality": self.modality.value,
            "topology": self.topology.value,
            "label": self.label.value,
            "num_clients": self.num_clients,
            "master_seed": self.master_seed,
            "modality_beta": self.modality_beta,
            "label_alpha": self.label_alpha,
            "topology_fit": [
                self.topology_fit.intra_p,
                self.topology_fit.inter_p,
                self.topology_fit.rdpg_noise,
            ],
            "split": list(self.split),
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.blake2b(blob, digest_size=8).hexdigest()


def label_assignment(
    graph: MultimodalGraph, config: ScenarioConfig, seed: int
) -> np.ndarray:
    if config.num_clients > graph.num_nodes:
        raise InvalidClientCount(config.num_clients, graph.num_nodes)
    if config.label is LabelMode.IID:
        return label_iid_assignment(graph, config.num_clients, seed)
    if config.label is LabelMode.LOUVAIN:
        return louvain_assignment(graph, config.num_clients, seed)
    if config.label is LabelMode.BALANCED:
        return balanced_greedy_assignment(graph, config.num_clients, seed)
    return label_dirichlet_assignment(
        graph, config.num_clients, config.label_alpha, seed
    )


def build_scenario(graph: MultimodalGraph, config: ScenarioConfig) -> PartitionResult:
    """
    Partition ``graph`` into client shards along all three scenario axes.

    The label axis runs first, then split masks are drawn, then the topology
    axis replaces edges and finally the modality axis masks features. Each
    stage gets its own seed derived from ``config.master_seed``, so the
    result is a pure function of ``(graph, config)``.
    """
    master = config.master_seed
    provenance = Provenance(scenario_hash=config.digest(), partition_seed=master)
    assignment = label_assignment(graph, config, derive_seed(master, "label"))
    shards = shards_from_assignment(
        graph,
        assignment,
        config.num_clients,
        derive_seed(master, "splits"),
        provenance=provenance,
        fractions=config.split,
    )
    shards = apply_topology_axis(
        shards, config.topology_axis, derive_seed(master, "topology")
    )
    if config.modality is ModalityMode.NONIID:
        shards = apply_modality_noniid(
            shards, config.modality_beta, derive_seed(master, "modality")
        )
    validate_shard_cover(shards, graph.num_nodes)
    report = compute_axis_report(graph, shards)
    log.info(
        "Built scenario %s: %s clients, mean label TV %.3f, edge retention %.3f",
        config.name,
        config.num_clients,
        report.mean_label_tv,
        report.global_edge_retention,
    )
    assignment.setflags(write=False)
    return PartitionResult(shards, assignment, report)
