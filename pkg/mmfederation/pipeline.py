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

from concurrent.futures import Executor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from mmgraph import derive_seed
from mmnn import make_optimizer

from .engine import EvalHook, RoundRecord, macro_average, make_eval_hook, run_round
from .local import local_train, local_train_early_stopping
from .log import log
from .state import ClientState, ServerState
from .tasks import Task

__all__ = (
    "FederatedRun",
    "LocalReport",
    "TwoStageReport",
    "run_federated",
    "run_isolated",
    "run_two_stage",
    "evaluate_locally",
)


@dataclass(frozen=True, eq=False)
class FederatedRun:
    server: ServerState
    clients: Tuple[ClientState, ...]
    records: Tuple[RoundRecord, ...]

    @property
    def final_metrics(self) -> Dict[str, float]:
        return dict(self.records[-1].metrics) if self.records else {}

    def curve(self, metric: str) -> List[float]:
        """Per-round values of ``metric``; rounds that lack it are skipped."""
        return [r.metrics[metric] for r in self.records if metric in r.metrics]


@dataclass(frozen=True)
class LocalReport:
    """Per-client metrics of locally trained models and their macro average."""

    per_client: Dict[int, Dict[str, float]]
    metrics: Dict[str, float]


@dataclass(frozen=True, eq=False)
class TwoStageReport:
    pretrain: FederatedRun
    before: LocalReport
    after: LocalReport


def run_federated(
    server: ServerState,
    clients: Sequence[ClientState],
    task: Task,
    rounds: int,
    *,
    eval_hook: Optional[EvalHook] = None,
    executor: Optional[Executor] = None,
) -> FederatedRun:
    """Run ``rounds`` rounds, evaluating on the test split after each one."""
    hook = eval_hook if eval_hook is not None else make_eval_hook(task)
    current = list(clients)
    records = []
    for _ in range(rounds):
        server, current, record = run_round(server, current, task, hook, executor)
        records.append(record)
        log.debug("Round %s metrics: %s", record.round_index, record.metrics)
    return FederatedRun(server, tuple(current), tuple(records))


def evaluate_locally(
    clients: Sequence[ClientState],
    task: Task,
    server: ServerState,
    split: str = "test",
) -> LocalReport:
    per_client = {
        client.client_id: task.evaluate(
            server.spec,
            client.params,
            client.data,
            split,
            derive_seed(server.seed, "eval", client.client_id),
        )
        for client in clients
    }
    return LocalReport(per_client, macro_average(per_client))


def _train_clients(
    clients: Sequence[ClientState],
    task: Task,
    server: ServerState,
    epochs: int,
    stage: str,
    patience: Optional[int],
    trainable: Optional[np.ndarray],
    executor: Optional[Executor],
) -> List[ClientState]:
    def train(client: ClientState) -> ClientState:
        seed = derive_seed(server.seed, stage, client.client_id)
        if patience is not None:
            trained, _ = local_train_early_stopping(
                client, task, server.spec, epochs, seed, patience, trainable=trainable
            )
        else:
            trained, _ = local_train(
                client, task, server.spec, epochs, seed, trainable=trainable
            )
        return trained

    if executor is None:
        return [train(client) for client in clients]
    return list(executor.map(train, clients))


def run_isolated(
    server: ServerState,
    clients: Sequence[ClientState],
    task: Task,
    epochs: int,
    *,
    patience: Optional[int] = None,
    executor: Optional[Executor] = None,
    split: str = "test",
    reset: bool = True,
) -> Tuple[List[ClientState], LocalReport]:
    """
    No-collaboration baseline: every client trains alone from the global init.

    With ``reset=False`` clients continue from their current parameters, so
    training can be split into chunks with an evaluation after each one.

    Divergence is not caught here, isolated training has nobody to exclude
    a client from.
    """
    starts = list(clients)
    if reset:
        starts = [c.replace(params=server.params.copy()) for c in clients]
    trained = _train_clients(
        starts, task, server, epochs, "isolated", patience, None, executor
    )
    return trained, evaluate_locally(trained, task, server, split)


def run_two_stage(
    server: ServerState,
    clients: Sequence[ClientState],
    pretrain_task: Task,
    downstream_task: Task,
    pretrain_rounds: int,
    finetune_epochs: int,
    *,
    finetune_backbone: bool = False,
    patience: Optional[int] = None,
    executor: Optional[Executor] = None,
    split: str = "test",
) -> TwoStageReport:
    """
    Federated self-supervised pretraining followed by local fine-tuning.

    Stage one runs ``pretrain_rounds`` rounds of ``pretrain_task``. In stage
    two every client copies the pretrained global model and fine-tunes it on
    ``downstream_task`` without further communication; only the ``head``
    segments train unless ``finetune_backbone`` is set. The report holds
    per-client metrics before and after fine-tuning.
    """
    downstream_task.validate(server.spec)
    pretrain = run_federated(
        server, clients, pretrain_task, pretrain_rounds, executor=executor
    )
    pretrained = pretrain.server
    config = pretrained.config.optimizer_for(downstream_task)
    finetune_clients = [
        client.replace(
            data=downstream_task.prepare(
                client.shard,
                derive_seed(pretrained.seed, "finetune-data", client.client_id),
            ),
            params=pretrained.params.copy(),
            optimizer=make_optimizer(config),
        )
        for client in pretrain.clients
    ]
    before = evaluate_locally(finetune_clients, downstream_task, pretrained, split)
    trainable = None
    if not finetune_backbone:
        trainable = pretrained.params.layout.selection(
            lambda name: name.startswith("head.")
        )
    tuned = _train_clients(
        finetune_clients,
        downstream_task,
        pretrained,
        finetune_epochs,
        "finetune",
        patience,
        trainable,
        executor,
    )
    after = evaluate_locally(tuned, downstream_task, pretrained, split)
    log.info(
        "Two-stage run done: %s pretraining rounds, %s before, %s after",
        pretrain_rounds,
        before.metrics,
        after.metrics,
    )
    return TwoStageReport(pretrain, before, after)
