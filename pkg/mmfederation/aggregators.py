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
Reference aggregation rules and their client-side local updates.

Server-side reductions accumulate in float64 over updates sorted by client
id, so neither the arrival order nor the participant order changes the
result.
"""

from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from mmnn import ModelSpec, ParamVector, forward

from .errors import EmptyAggregation, InvalidStepBudget, NoClassSamplesError
from .local import GradHook, local_train
from .state import ClientState
from .tasks import ClientData, HiddenHook, Task

__all__ = (
    "ClientUpdate",
    "aggregate_fedavg",
    "fedprox_hook",
    "local_update_fedprox",
    "scaffold_hook",
    "scaffold_control_update",
    "local_update_scaffold",
    "scaffold_server_update",
    "compute_prototypes",
    "aggregate_prototypes",
    "prototype_hook",
)


class ClientUpdate(NamedTuple):
    """Uplink of one client: parameters (or a delta) and its weight."""

    client_id: int
    params: ParamVector
    num_samples: float
    control_delta: Optional[ParamVector] = None


def _weighted_mean(vectors: Sequence[Tuple[int, np.ndarray, float]]) -> np.ndarray:
    ordered = sorted(vectors, key=lambda item: item[0])
    total = sum(weight for _, _, weight in ordered)
    if not ordered or total <= 0:
        raise EmptyAggregation("Aggregation needs at least one update with weight")
    acc = np.zeros(ordered[0][1].shape[0], dtype=np.float64)
    for _, values, weight in ordered:
        acc += weight * values.astype(np.float64)
    return acc / total


def aggregate_fedavg(updates: Sequence[ClientUpdate]) -> ParamVector:
    """
    Sample-weighted coordinate mean of client models.

    Raises
    ------
    EmptyAggregation
        When there is no update or every weight is 0.
    """
    if not updates:
        raise EmptyAggregation("Aggregation needs at least one update")
    layout = updates[0].params.layout
    for update in updates:
        update.params.check_layout(layout)
    mean = _weighted_mean(
        [(u.client_id, u.params.values, float(u.num_samples)) for u in updates]
    )
    return ParamVector(layout, mean.astype(updates[0].params.dtype))


def fedprox_hook(global_params: ParamVector, mu: float) -> GradHook:
    """Gradient of ``(mu / 2) * ||w - w_global||^2`` added to the task gradient."""
    anchor = global_params.values.astype(np.float64)

    def hook(params: ParamVector, grads: ParamVector) -> ParamVector:
        prox = mu * (params.values.astype(np.float64) - anchor)
        return grads.with_values((grads.values + prox).astype(grads.dtype))

    return hook


def local_update_fedprox(
    client: ClientState,
    task: Task,
    spec: ModelSpec,
    global_params: ParamVector,
    mu: float,
    seed: int,
) -> Tuple[ClientState, float]:
    """Local epochs on the proximal objective; mu = 0 is plain local training."""
    client = client.replace(params=global_params.copy())
    hook = fedprox_hook(global_params, mu) if mu > 0 else None
    return local_train(client, task, spec, client.local_epochs, seed, grad_hook=hook)


def scaffold_hook(control: ParamVector, client_control: ParamVector) -> GradHook:
    """Drift correction ``g + c - c_i``."""
    correction = control.values.astype(np.float64) - client_control.values

    def hook(params: ParamVector, grads: ParamVector) -> ParamVector:
        return grads.with_values((grads.values + correction).astype(grads.dtype))

    return hook


def scaffold_control_update(
    client_control: ParamVector,
    control: ParamVector,
    global_params: ParamVector,
    local_params: ParamVector,
    lr: float,
    epochs: int,
    steps: int = 1,
) -> ParamVector:
    """
    New client control variate ``c_i - c + (w_global - w_local) / (lr * E * S)``.

    Raises
    ------
    InvalidStepBudget
        When ``lr * epochs * steps`` is 0.
    """
    budget = lr * epochs * steps
    if budget == 0:
        raise InvalidStepBudget(
            f"Control update needs lr * epochs * steps > 0, got {budget}"
        )
    values = (
        client_control.values.astype(np.float64)
        - control.values
        + (global_params.values.astype(np.float64) - local_params.values) / budget
    )
    return client_control.with_values(values.astype(client_control.dtype))


def local_update_scaffold(
    client: ClientState,
    task: Task,
    spec: ModelSpec,
    global_params: ParamVector,
    control: ParamVector,
    seed: int,
) -> Tuple[ClientState, float, ParamVector, ParamVector]:
    """
    Drift-corrected local epochs.

    Returns
    -------
    tuple
        Updated client, last loss, model delta and control variate delta.
    """
    client_control = client.control
    if client_control is None:
        client_control = global_params.zeros_like()
    epochs = client.local_epochs
    if client.lr * epochs == 0:
        raise InvalidStepBudget(
            f"Client {client.client_id} has a zero local step budget"
        )
    start = client.replace(params=global_params.copy())
    trained, loss = local_train(
        start,
        task,
        spec,
        epochs,
        seed,
        grad_hook=scaffold_hook(control, client_control),
    )
    new_control = scaffold_control_update(
        client_control, control, global_params, trained.params, client.lr, epochs
    )
    delta_w = trained.params.with_values(
        (trained.params.values.astype(np.float64) - global_params.values).astype(
            global_params.dtype
        )
    )
    delta_c = new_control.with_values(
        (new_control.values.astype(np.float64) - client_control.values).astype(
            new_control.dtype
        )
    )
    return trained.replace(control=new_control), loss, delta_w, delta_c


def scaffold_server_update(
    global_params: ParamVector,
    control: ParamVector,
    updates: Sequence[ClientUpdate],
    num_clients: int,
) -> Tuple[ParamVector, ParamVector]:
    """
    Apply the weighted mean model delta and move the server control variate.

    ``updates`` carry model deltas in ``params`` and control deltas in
    ``control_delta``. The control variate moves by
    ``(participants / K) * mean(delta_c)``.
    """
    if not updates:
        raise EmptyAggregation("Aggregation needs at least one update")
    delta_w = _weighted_mean(
        [(u.client_id, u.params.values, float(u.num_samples)) for u in updates]
    )
    deltas_c = []
    for update in sorted(updates, key=lambda u: u.client_id):
        assert update.control_delta is not None, "mypy"
        deltas_c.append(update.control_delta.values.astype(np.float64))
    mean_c = np.sum(deltas_c, axis=0) / len(deltas_c)
    params = global_params.values.astype(np.float64) + delta_w
    new_control = control.values.astype(np.float64) + (
        len(updates) / num_clients
    ) * mean_c
    return (
        global_params.with_values(params.astype(global_params.dtype)),
        control.with_values(new_control.astype(control.dtype)),
    )


def compute_prototypes(
    spec: ModelSpec, params: ParamVector, data: ClientData, client_id: int = -1
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Class means of the embedding over a client's training nodes.

    Returns
    -------
    tuple
        ``(C, h)`` float32 prototypes (zero rows for absent classes) and the
        int64 per-class counts.

    Raises
    ------
    NoClassSamplesError
        When the client has no training sample of any class.
    """
    num_classes = spec.output_dim
    mask = data.label_mask("train")
    labels = data.batch.labels
    if labels is None or not mask.any():
        raise NoClassSamplesError(f"Client {client_id} has no training samples")
    hidden = forward(spec, params, data.batch).hidden[mask].astype(np.float64)
    y = labels[mask]
    counts = np.bincount(y, minlength=num_classes).astype(np.int64)
    sums = np.zeros((num_classes, hidden.shape[1]), dtype=np.float64)
    np.add.at(sums, y, hidden)
    protos = sums / np.maximum(counts, 1)[:, None]
    return protos.astype(np.float32), counts


def aggregate_prototypes(
    local: Sequence[Tuple[int, np.ndarray, np.ndarray]]
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Count-weighted mean of ``(client_id, prototypes, counts)`` triples.

    Classes no client has seen get a zero prototype and a zero count.
    """
    if not local:
        raise EmptyAggregation("Prototype aggregation needs at least one client")
    ordered = sorted(local, key=lambda item: item[0])
    sums = np.zeros(ordered[0][1].shape, dtype=np.float64)
    counts = np.zeros(ordered[0][2].shape, dtype=np.int64)
    for _, protos, class_counts in ordered:
        sums += class_counts[:, None] * protos.astype(np.float64)
        counts += class_counts
    protos = sums / np.maximum(counts, 1)[:, None]
    return protos.astype(np.float32), counts


def prototype_hook(
    prototypes: np.ndarray, counts: np.ndarray, weight: float
) -> HiddenHook:
    """
    Regularizer ``weight * mean ||z_i - P[y_i]||^2`` over training nodes.

    Nodes whose class has no global prototype are left out.
    """

    def hook(hidden: np.ndarray, data: ClientData) -> Tuple[float, np.ndarray]:
        d_hidden = np.zeros_like(hidden)
        labels = data.batch.labels
        if labels is None or weight == 0:
            return 0.0, d_hidden
        rows = np.flatnonzero(data.label_mask("train"))
        rows = rows[counts[labels[rows]] > 0]
        if not rows.size:
            return 0.0, d_hidden
        diff = hidden[rows].astype(np.float64) - prototypes[labels[rows]]
        loss = weight * float(np.mean(np.sum(diff * diff, axis=1)))
        d_hidden[rows] = (2.0 * weight / rows.size) * diff
        return loss, d_hidden

    return hook

