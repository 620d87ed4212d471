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

__all__ = (
    "PartitionException",
    "InvalidClientCount",
    "InsufficientLabelsError",
    "ModalityCountError",
    "InvalidScenarioParams",
    "ModularityDecreased",
    "PartitionStorageError",
)


class PartitionException(Exception):
    """Base exception class for mmpartition."""


class InvalidClientCount(PartitionException, ValueError):
    """Client count is below 1 or above the number of nodes."""

    def __init__(self, num_clients: int, num_nodes: int) -> None:
        self.num_clients = num_clients
        self.num_nodes = num_nodes
        super().__init__(
            f"Can't split {num_nodes} nodes between {num_clients} clients"
        )


class InsufficientLabelsError(PartitionException, ValueError):
    """Label-driven partitioning needs more labeled nodes than the graph has."""


class ModalityCountError(PartitionException, ValueError):
    """Modality-NonIID masking needs at least two modalities."""


class InvalidScenarioParams(PartitionException, ValueError):
    """Scenario parameter is outside of its legal range."""


class ModularityDecreased(PartitionException):
    """A Louvain local-move pass lowered modularity."""

    def __init__(self, before: float, after: float) -> None:
        self.before = before
        self.after = after
        super().__init__(
            f"Louvain pass lowered modularity from {before:.6f} to {after:.6f}"
        )


class PartitionStorageError(PartitionException):
    """Saved partition directory is incomplete or inconsistent."""
