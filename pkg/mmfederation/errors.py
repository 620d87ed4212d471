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

from typing import Optional

__all__ = (
    "FederationException",
    "EmptyAggregation",
    "ClientDivergedError",
    "InvalidStepBudget",
    "NoClassSamplesError",
    "PayloadError",
    "TaskMismatch",
)


class FederationException(Exception):
    """Base exception class for mmfederation."""


class EmptyAggregation(FederationException, ValueError):
    """Aggregation got no update, or only updates with zero weight."""


class ClientDivergedError(FederationException):
    """
    Local training produced a non-finite loss or gradient.

    Attributes
    ----------
    client_id: `int`
        Client that diverged.
    loss: `float`, optional
        Last loss value, if one was computed.
    """

    def __init__(self, client_id: int, loss: Optional[float] = None) -> None:
        self.client_id = client_id
        self.loss = loss
        super().__init__(f"Client {client_id} diverged (loss: {loss})")


class InvalidStepBudget(FederationException, ValueError):
    """SCAFFOLD control update needs a positive ``lr * epochs * steps``."""


class NoClassSamplesError(FederationException, ValueError):
    """Client has no training sample of any class to build prototypes from."""


class PayloadError(FederationException, ValueError):
    """Serialized payload doesn't match the expected layout."""


class TaskMismatch(FederationException, ValueError):
    """Task, model and aggregator can't be combined."""
