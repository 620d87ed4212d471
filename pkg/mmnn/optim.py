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
First-order optimizers over flat parameter vectors.

Weight decay is L2 regularization added to the gradient before the update.
Optimizer state stays with its owner and is never communicated.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import NonFiniteGradient
from .params import ParamVector

__all__ = (
    "OptimizerKind",
    "OptimizerConfig",
    "Optimizer",
    "SGD",
    "Adam",
    "make_optimizer",
    "sgd_step",
    "adam_step",
    "check_finite",
)


class OptimizerKind(Enum):
    SGD = "sgd"
    ADAM = "adam"


@dataclass(frozen=True)
class OptimizerConfig:
    kind: OptimizerKind = OptimizerKind.ADAM
    lr: float = 5e-3
    weight_decay: float = 1e-5
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def check_finite(grads: ParamVector) -> None:
    bad = ~np.isfinite(grads.values)
    if bad.any():
        raise NonFiniteGradient(grads.first_segment(bad) or "?", int(bad.sum()))


class Optimizer:
    """
    Base class of the optimizers.

    ``trainable`` optionally restricts updates to a coordinate mask, frozen
    coordinates get neither gradient nor weight decay.
    """

    def __init__(self, config: OptimizerConfig) -> None:
        self.config = config

    def _effective_grad(
        self, params: ParamVector, grads: ParamVector, trainable: Optional[np.ndarray]
    ) -> np.ndarray:
        check_finite(grads)
        grad = grads.values + self.config.weight_decay * params.values
        if trainable is not None:
            grad = np.where(trainable, grad, 0.0)
        return grad

    def step(
        self,
        params: ParamVector,
        grads: ParamVector,
        trainable: Optional[np.ndarray] = None,
    ) -> ParamVector:
        raise NotImplementedError


class SGD(Optimizer):
    def step(
        self,
        params: ParamVector,
        grads: ParamVector,
        trainable: Optional[np.ndarray] = None,
    ) -> ParamVector:
        grad = self._effective_grad(params, grads, trainable)
        values = params.values - self.config.lr * grad
        return params.with_values(values.astype(params.dtype, copy=False))


class Adam(Optimizer):
    def __init__(self, config: OptimizerConfig) -> None:
        super().__init__(config)
        self.first_moment: Optional[np.ndarray] = None
        self.second_moment: Optional[np.ndarray] = None
        self.steps = 0

    def reset(self) -> None:
        self.first_moment = None
        self.second_moment = None
        self.steps = 0

    def step(
        self,
        params: ParamVector,
        grads: ParamVector,
        trainable: Optional[np.ndarray] = None,
    ) -> ParamVector:
        config = self.config
        grad = self._effective_grad(params, grads, trainable).astype(np.float64)
        if self.first_moment is None or self.second_moment is None:
            self.first_moment = np.zeros(params.size, dtype=np.float64)
            self.second_moment = np.zeros(params.size, dtype=np.float64)
        self.steps += 1
        self.first_moment = config.beta1 * self.first_moment + (1 - config.beta1) * grad
        self.second_moment = (
            config.beta2 * self.second_moment + (1 - config.beta2) * grad * grad
        )
        m_hat = self.first_moment / (1 - config.beta1**self.steps)
        v_hat = self.second_moment / (1 - config.beta2**self.steps)
        values = params.values - config.lr * m_hat / (np.sqrt(v_hat) + config.eps)
        return params.with_values(values.astype(params.dtype, copy=False))


def make_optimizer(config: OptimizerConfig) -> Optimizer:
    if config.kind is OptimizerKind.SGD:
        return SGD(config)
    return Adam(config)


def sgd_step(
    params: ParamVector, grads: ParamVector, config: OptimizerConfig
) -> ParamVector:
    """Stateless single SGD update."""
    return SGD(config).step(params, grads)


def adam_step(params: ParamVector, grads: ParamVector, optimizer: Adam) -> ParamVector:
    """Single Adam update; the moments live on ``optimizer``."""
    return optimizer.step(params, grads)
