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
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np

from mmgraph import ClientShard, derive_seed
from mmnn import (
    ModelSpec,
    Optimizer,
    OptimizerConfig,
    ParamVector,
    init_params,
    make_optimizer,
)

from .errors import TaskMismatch
from .tasks import ClientData, NodeClassification, Task

__all__ = (
    "AggregatorKind",
    "AggregatorConfig",
    "FederationConfig",
    "ServerState",
    "ClientState",
    "init_server",
    "init_clients",
)


class AggregatorKind(Enum):
    FEDAVG = "fedavg"
    FEDPROX = "fedprox"
    SCAFFOLD = "scaffold"
    FEDPROTO = "fedproto"

    @property
    def exchanges_weights(self) -> bool:
        return self is not AggregatorKind.FEDPROTO


@dataclass(frozen=True)
class AggregatorConfig:
    """
    Aggregator choice and its hyperparameters.

    Attributes
    ----------
    kind: `AggregatorKind`
        Aggregation algorithm.
    mu: `float`
        FedProx proximal weight.
    proto_lambda: `float`
        FedProto prototype regularizer weight.
    """

    kind: AggregatorKind = AggregatorKind.FEDAVG
    mu: float = 0.0
    proto_lambda: float = 1.0

    def __post_init__(self) -> None:
        if self.mu < 0:
            raise TaskMismatch(f"FedProx mu has to be non-negative, got {self.mu}")
        if self.proto_lambda < 0:
            raise TaskMismatch(
                f"proto_lambda has to be non-negative, got {self.proto_lambda}"
            )


@dataclass(frozen=True)
class FederationConfig:
    """
    Protocol settings shared by the server and every client.

    ``optimizer.lr`` is only used when ``lr`` is left at None, in which case
    the task's own default learning rate wins.
    """

    aggregator: AggregatorConfig = field(default_factory=AggregatorConfig)
    local_epochs: int = 1
    participation: float = 1.0
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    lr: Optional[float] = None

    def __post_init__(self) -> None:
        if self.local_epochs < 0:
            raise TaskMismatch("local_epochs has to be non-negative")
        if not 0.0 < self.participation <= 1.0:
            raise TaskMismatch(
                f"participation has to be in (0, 1], got {self.participation}"
            )

    def optimizer_for(self, task: Task) -> OptimizerConfig:
        lr = task.default_lr if self.lr is None else self.lr
        return dataclasses.replace(self.optimizer, lr=lr)


@dataclass(frozen=True, eq=False)
class ServerState:
    """
    Server side of a federation between rounds.

    Attributes
    ----------
    spec: `ModelSpec`
        Shared model architecture.
    params: `ParamVector`
        Global model.
    round_index: `int`
        Number of completed rounds.
    config: `FederationConfig`
        Protocol settings.
    num_clients: `int`
        Size of the federation.
    seed: `int`
        Master seed every round-level draw derives from.
    control: `ParamVector`, optional
        SCAFFOLD server control variate.
    prototypes: `numpy.ndarray`, optional
        FedProto global ``(C, h)`` prototypes.
    proto_counts: `numpy.ndarray`, optional
        Per-class sample counts behind ``prototypes``.
    """

    spec: ModelSpec
    params: ParamVector
    round_index: int
    config: FederationConfig
    num_clients: int
    seed: int
    control: Optional[ParamVector] = None
    prototypes: Optional[np.ndarray] = None
    proto_counts: Optional[np.ndarray] = None

    @property
    def aggregator(self) -> AggregatorConfig:
        return self.config.aggregator

    def replace(self, **changes: object) -> ServerState:
        return dataclasses.replace(self, **changes)  # type: ignore[arg-type]


@dataclass(frozen=True, eq=False)
class ClientState:
    """
    One client's private training state.

    The optimizer object is owned by the client and keeps its moments
    across rounds.
    """

    client_id: int
    data: ClientData
    params: ParamVector
    optimizer: Optimizer
    local_epochs: int
    control: Optional[ParamVector] = None
    prototypes: Optional[np.ndarray] = None
    proto_counts: Optional[np.ndarray] = None

    @property
    def shard(self) -> ClientShard:
        return self.data.shard

    @property
    def lr(self) -> float:
        return self.optimizer.config.lr

    def replace(self, **changes: object) -> ClientState:
        return dataclasses.replace(self, **changes)  # type: ignore[arg-type]


def init_server(
    spec: ModelSpec,
    config: FederationConfig,
    task: Task,
    num_clients: int,
    seed: int,
) -> ServerState:
    """Validate the combination and draw the initial global model."""
    task.validate(spec)
    kind = config.aggregator.kind
    if kind is AggregatorKind.FEDPROTO and not isinstance(task, NodeClassification):
        raise TaskMismatch("FedProto needs a node classification task")
    params = init_params(spec, derive_seed(seed, "init"))
    return ServerState(
        spec=spec,
        params=params,
        round_index=0,
        config=config,
        num_clients=num_clients,
        seed=seed,
        control=params.zeros_like() if kind is AggregatorKind.SCAFFOLD else None,
    )


def init_clients(
    server: ServerState, shards: Sequence[ClientShard], task: Task
) -> List[ClientState]:
    """Build one client per shard, each starting from a copy of the global model."""
    kind = server.aggregator.kind
    clients = []
    for shard in sorted(shards, key=lambda s: s.client_id):
        data = task.prepare(shard, derive_seed(server.seed, "data", shard.client_id))
        clients.append(
            ClientState(
                client_id=shard.client_id,
                data=data,
                params=server.params.copy(),
                optimizer=make_optimizer(server.config.optimizer_for(task)),
                local_epochs=server.config.local_epochs,
                control=(
                    server.params.zeros_like()
                    if kind is AggregatorKind.SCAFFOLD
                    else None
                ),
            )
        )
    return clients
