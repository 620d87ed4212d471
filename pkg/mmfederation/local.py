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

"""Local training loops run by a single client."""

from typing import Callable, Optional, Tuple

import numpy as np

from mmgraph import derive_seed
from mmnn import ModelSpec, NonFiniteGradient, ParamVector

from .errors import ClientDivergedError
from .log import log
from .state import ClientState
from .tasks import HiddenHook, Task

__all__ = ("GradHook", "local_train", "local_train_early_stopping")

#: ``(params, grads) -> grads`` correction applied before each optimizer step.
GradHook = Callable[[ParamVector, ParamVector], ParamVector]


def _epoch(
    client: ClientState,
    task: Task,
    spec: ModelSpec,
    params: ParamVector,
    seed: int,
    grad_hook: Optional[GradHook],
    hidden_hook: Optional[HiddenHook],
    trainable: Optional[np.ndarray],
) -> Tuple[ParamVector, float]:
    loss, grads = task.loss(spec, params, client.data, seed, hidden_hook)
    if not np.isfinite(loss):
        raise ClientDivergedError(client.client_id, loss)
    if grad_hook is not None:
        grads = grad_hook(params, grads)
    try:
        params = client.optimizer.step(params, grads, trainable)
    except NonFiniteGradient as e:
        raise ClientDivergedError(client.client_id, loss) from e
    if not np.isfinite(params.values).all():
        raise ClientDivergedError(client.client_id, loss)
    return params, loss


def local_train(
    client: ClientState,
    task: Task,
    spec: ModelSpec,
    epochs: int,
    seed: int,
    *,
    grad_hook: Optional[GradHook] = None,
    hidden_hook: Optional[HiddenHook] = None,
    trainable: Optional[np.ndarray] = None,
) -> Tuple[ClientState, float]:
    """
    Run ``epochs`` full-batch optimizer steps on the client's task loss.

    Returns
    -------
    tuple
        Updated client state and the loss of the last epoch
        (NaN when ``epochs`` is 0).

    Raises
    ------
    ClientDivergedError
        When a loss, gradient or updated parameter isn't finite.
    """
    params = client.params
    loss = float("nan")
    for epoch in range(epochs):
        params, loss = _epoch(
            client,
            task,
            spec,
            params,
            derive_seed(seed, epoch),
            grad_hook,
            hidden_hook,
            trainable,
        )
        log.debug("Client %s epoch %s loss %.6f", client.client_id, epoch, loss)
    return client.replace(params=params), loss


def local_train_early_stopping(
    client: ClientState,
    task: Task,
    spec: ModelSpec,
    epochs: int,
    seed: int,
    patience: int,
    *,
    trainable: Optional[np.ndarray] = None,
) -> Tuple[ClientState, float]:
    """
    Train like `local_train()` but stop once the validation metric stalls.

    The task's primary metric on the client's validation split is checked
    after every epoch. Training stops after ``patience`` epochs without
    improvement and the client keeps the best parameters seen. Clients
    without a usable validation split train for all ``epochs``.
    """
    params = client.params
    best_params = params
    best_score: Optional[float] = None
    stale = 0
    loss = float("nan")
    sign = 1.0 if task.higher_is_better else -1.0
    eval_seed = derive_seed(seed, "val")
    for epoch in range(epochs):
        params, loss = _epoch(
            client, task, spec, params, derive_seed(seed, epoch), None, None, trainable
        )
        metrics = task.evaluate(spec, params, client.data, "val", eval_seed)
        score = metrics.get(task.primary_metric)
        if score is None:
            best_params = params
            continue
        if best_score is None or sign * score > sign * best_score:
            best_score, best_params, stale = score, params, 0
        else:
            stale += 1
            if stale >= patience:
                log.debug(
                    "Client %s stopped early after %s epochs", client.client_id, epoch
                )
                break
    return client.replace(params=best_params), loss
