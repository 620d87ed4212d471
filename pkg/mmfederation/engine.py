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
Round engine of the federated protocol.

A round samples participants, broadcasts the server payload, runs local
updates (possibly on an executor), uploads client payloads and aggregates
them. Every payload really goes through the wire codec, so the byte counts
in a `RoundRecord` are the lengths of what was exchanged.
"""

from __future__ import annotations

import time
from concurrent.futures import Executor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from mmgraph import derive_seed, make_rng, round_half_up

from .aggregators import (
    ClientUpdate,
    aggregate_fedavg,
    aggregate_prototypes,
    compute_prototypes,
    local_update_fedprox,
    local_update_scaffold,
    prototype_hook,
    scaffold_server_update,
)
from .errors import ClientDivergedError, EmptyAggregation, NoClassSamplesError
from .local import local_train
from .log import log
from .payload import decode_params, decode_prototypes, encode_params, encode_prototypes
from .state import AggregatorKind, ClientState, ServerState
from .tasks import Task

__all__ = (
    "RoundRecord",
    "EvalHook",
    "sample_clients",
    "run_round",
    "fedproto_round",
    "evaluate",
    "make_eval_hook",
    "macro_average",
)

_T = TypeVar("_T")
_R = TypeVar("_R")

#: ``(server, clients) -> (global metrics, per-client metrics)``
EvalHook = Callable[
    [ServerState, Sequence[ClientState]],
    Tuple[Dict[str, float], Dict[int, Dict[str, float]]],
]


@dataclass(frozen=True)
class RoundRecord:
    """
    Telemetry of one federated round.

    Attributes
    ----------
    round_index: `int`
        1-based index of the round.
    participants: `tuple` of `int`
        Sampled client ids, sorted.
    train_loss: `dict`
        Last local epoch loss of every client that finished training.
    metrics: `dict`
        Global evaluation metrics after aggregation.
    client_metrics: `dict`
        Client id -> evaluation metrics of that client.
    uplink_bytes: `int`
        Total bytes sent by clients.
    downlink_bytes: `int`
        Total bytes sent by the server.
    wall_ms: `float`
        Wall-clock duration of the round, evaluation excluded.
    diverged: `tuple` of `int`
        Participants left out of aggregation.
    """

    round_index: int
    participants: Tuple[int, ...]
    train_loss: Dict[int, float]
    metrics: Dict[str, float]
    client_metrics: Dict[int, Dict[str, float]] = field(default_factory=dict)
    uplink_bytes: int = 0
    downlink_bytes: int = 0
    wall_ms: float = 0.0
    diverged: Tuple[int, ...] = ()

    @property
    def total_bytes(self) -> int:
        return self.uplink_bytes + self.downlink_bytes

    def to_dict(self, *, timing: bool = True) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "round": self.round_index,
            "participants": list(self.participants),
            "diverged": list(self.diverged),
            "train_loss": {str(k): v for k, v in sorted(self.train_loss.items())},
            "metrics": dict(sorted(self.metrics.items())),
            "uplink_bytes": self.uplink_bytes,
            "downlink_bytes": self.downlink_bytes,
        }
        if timing:
            data["wall_ms"] = self.wall_ms
        return data


@dataclass
class _Traffic:
    uplink: int = 0
    downlink: int = 0
    losses: Dict[int, float] = field(default_factory=dict)
    excluded: List[int] = field(default_factory=list)


def sample_clients(
    num_clients: int, participation: float, seed: int, round_index: int
) -> Tuple[int, ...]:
    """
    Uniformly sample ``max(1, round(participation * K))`` clients.

    Full participation skips the draw and returns every client.
    """
    count = min(num_clients, max(1, round_half_up(participation * num_clients)))
    if count == num_clients:
        return tuple(range(num_clients))
    rng = make_rng(derive_seed(seed, "sample", round_index))
    return tuple(sorted(int(k) for k in rng.choice(num_clients, count, replace=False)))


def _map(
    executor: Optional[Executor], fn: Callable[[_T], _R], items: Sequence[_T]
) -> List[_R]:
    if executor is None:
        return [fn(item) for item in items]
    return list(executor.map(fn, items))


def _local_seed(server: ServerState, client_id: int) -> int:
    return derive_seed(server.seed, "local", server.round_index, client_id)


def _weights_round(
    server: ServerState,
    clients: List[ClientState],
    participants: Sequence[int],
    task: Task,
    executor: Optional[Executor],
    traffic: _Traffic,
) -> ServerState:
    layout = server.params.layout
    kind = server.aggregator.kind
    model_payload = encode_params(server.params)
    traffic.downlink += len(model_payload) * len(participants)
    received = decode_params(layout, model_payload)
    control = None
    if kind is AggregatorKind.SCAFFOLD:
        assert server.control is not None, "mypy"
        control_payload = encode_params(server.control)
        traffic.downlink += len(control_payload) * len(participants)
        control = decode_params(layout, control_payload)

    def train(cid: int) -> Any:
        client = clients[cid]
        seed = _local_seed(server, cid)
        try:
            if control is not None:
                trained, loss, delta_w, delta_c = local_update_scaffold(
                    client, task, server.spec, received, control, seed
                )
                return trained, loss, (encode_params(delta_w), encode_params(delta_c))
            mu = server.aggregator.mu if kind is AggregatorKind.FEDPROX else 0.0
            trained, loss = local_update_fedprox(
                client, task, server.spec, received, mu, seed
            )
            return trained, loss, (encode_params(trained.params),)
        except ClientDivergedError as e:
            return e

    updates = []
    for cid, outcome in zip(participants, _map(executor, train, participants)):
        if isinstance(outcome, ClientDivergedError):
            log.warning("Client %s diverged in round %s", cid, server.round_index + 1)
            traffic.excluded.append(cid)
            continue
        trained, loss, payloads = outcome
        clients[cid] = trained
        traffic.losses[cid] = loss
        traffic.uplink += sum(len(p) for p in payloads)
        decoded = [decode_params(layout, p) for p in payloads]
        updates.append(
            ClientUpdate(
                client_id=cid,
                params=decoded[0],
                num_samples=task.num_samples(trained.data),
                control_delta=decoded[1] if len(decoded) > 1 else None,
            )
        )

    try:
        if control is not None:
            assert server.control is not None, "mypy"
            params, new_control = scaffold_server_update(
                server.params, server.control, updates, server.num_clients
            )
            return server.replace(params=params, control=new_control)
        return server.replace(params=aggregate_fedavg(updates))
    except EmptyAggregation:
        log.warning(
            "Round %s had nothing to aggregate, keeping the global model",
            server.round_index + 1,
        )
        return server


def fedproto_round(
    server: ServerState,
    clients: List[ClientState],
    participants: Sequence[int],
    task: Task,
    executor: Optional[Executor] = None,
    traffic: Optional[_Traffic] = None,
) -> ServerState:
    """
    One prototype-sharing round.

    Participants train their own model with the prototype regularizer
    (once global prototypes exist), then upload class prototypes of their
    training nodes. No model weights leave a client. ``clients`` is updated
    in place.
    """
    traffic = traffic if traffic is not None else _Traffic()
    spec = server.spec
    num_classes, dim = spec.output_dim, spec.embedding_dim
    hook = None
    if server.prototypes is not None and server.proto_counts is not None:
        payload = encode_prototypes(server.prototypes, server.proto_counts)
        traffic.downlink += len(payload) * len(participants)
        prototypes, counts = decode_prototypes(payload, num_classes, dim)
        hook = prototype_hook(prototypes, counts, server.aggregator.proto_lambda)

    def train(cid: int) -> Any:
        client = clients[cid]
        try:
            trained, loss = local_train(
                client,
                task,
                spec,
                client.local_epochs,
                _local_seed(server, cid),
                hidden_hook=hook,
            )
            protos, counts = compute_prototypes(spec, trained.params, trained.data, cid)
        except (ClientDivergedError, NoClassSamplesError) as e:
            return e
        trained = trained.replace(prototypes=protos, proto_counts=counts)
        return trained, loss, encode_prototypes(protos, counts)

    uploads = []
    for cid, outcome in zip(participants, _map(executor, train, participants)):
        if isinstance(outcome, Exception):
            log.warning(
                "Client %s left out of round %s: %s",
                cid,
                server.round_index + 1,
                outcome,
            )
            traffic.excluded.append(cid)
            continue
        trained, loss, payload = outcome
        clients[cid] = trained
        traffic.losses[cid] = loss
        traffic.uplink += len(payload)
        protos, counts = decode_prototypes(payload, num_classes, dim)
        uploads.append((cid, protos, counts))

    if not uploads:
        log.warning("Round %s had no prototypes to aggregate", server.round_index + 1)
        return server
    prototypes, counts = aggregate_prototypes(uploads)
    return server.replace(prototypes=prototypes, proto_counts=counts)


def run_round(
    server: ServerState,
    clients: Sequence[ClientState],
    task: Task,
    eval_hook: Optional[EvalHook] = None,
    executor: Optional[Executor] = None,
) -> Tuple[ServerState, List[ClientState], RoundRecord]:
    """
    Run one synchronous round.

    ``clients[k]`` must be the state of client ``k``. Clients whose local training
    diverges are left out of aggregation and listed in the record.
    """
    start = time.perf_counter()
    participants = sample_clients(
        server.num_clients,
        server.config.participation,
        server.seed,
        server.round_index,
    )
    updated = list(clients)
    traffic = _Traffic()
    if server.aggregator.kind is AggregatorKind.FEDPROTO:
        new_server = fedproto_round(
            server, updated, participants, task, executor, traffic
        )
    else:
        new_server = _weights_round(
            server, updated, participants, task, executor, traffic
        )
    new_server = new_server.replace(round_index=server.round_index + 1)
    wall_ms = (time.perf_counter() - start) * 1000.0

    metrics: Dict[str, float] = {}
    client_metrics: Dict[int, Dict[str, float]] = {}
    if eval_hook is not None:
        metrics, client_metrics = eval_hook(new_server, updated)
    record = RoundRecord(
        round_index=new_server.round_index,
        participants=participants,
        train_loss=dict(sorted(traffic.losses.items())),
        metrics=metrics,
        client_metrics=client_metrics,
        uplink_bytes=traffic.uplink,
        downlink_bytes=traffic.downlink,
        wall_ms=wall_ms,
        diverged=tuple(sorted(traffic.excluded)),
    )
    log.debug(
        "Round %s done: %s participants, %s bytes up, %s bytes down, metrics %s",
        record.round_index,
        len(participants),
        record.uplink_bytes,
        record.downlink_bytes,
        metrics,
    )
    return new_server, updated, record


def macro_average(per_client: Dict[int, Dict[str, float]]) -> Dict[str, float]:
    """Mean of every metric over the clients that report it."""
    keys = sorted({key for metrics in per_client.values() for key in metrics})
    return {
        key: float(
            np.mean([m[key] for _, m in sorted(per_client.items()) if key in m])
        )
        for key in keys
    }


def evaluate(
    server: ServerState,
    clients: Sequence[ClientState],
    task: Task,
    split: str = "test",
    *,
    use_client_models: Optional[bool] = None,
) -> Tuple[Dict[str, float], Dict[int, Dict[str, float]]]:
    """
    Evaluate on ``split`` of every client.

    With the global model the headline metrics are computed on the union of
    the clients' samples. With per-client models (prototype sharing, or
    when requested) they are the macro average over clients.
    """
    if use_client_models is None:
        use_client_models = not server.aggregator.kind.exchanges_weights
    collected = {}
    for client in clients:
        params = client.params if use_client_models else server.params
        collected[client.client_id] = task.collect(
            server.spec,
            params,
            client.data,
            split,
            derive_seed(server.seed, "eval", client.client_id),
        )
    per_client = {cid: task.score([c]) for cid, c in sorted(collected.items())}
    if use_client_models:
        return macro_average(per_client), per_client
    return task.score([collected[cid] for cid in sorted(collected)]), per_client


def make_eval_hook(task: Task, split: str = "test") -> EvalHook:
    def hook(
        server: ServerState, clients: Sequence[ClientState]
    ) -> Tuple[Dict[str, float], Dict[int, Dict[str, float]]]:
        return evaluate(server, clients, task, split)

    return hook
