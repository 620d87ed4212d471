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

"""Scenario simulation along the label, topology and modality axes."""

from .errors import (
    InsufficientLabelsError,
    InvalidClientCount,
    InvalidScenarioParams,
    ModalityCountError,
    ModularityDecreased,
    PartitionException,
    PartitionStorageError,
)
from .label_axis import (
    balanced_greedy_assignment,
    dirichlet_proportions,
    label_dirichlet_assignment,
    label_iid_assignment,
    largest_remainder_counts,
    louvain_assignment,
    partition_balanced_greedy,
    partition_by_labels_louvain,
    partition_label_dirichlet,
    partition_label_iid,
)
from .louvain import louvain, modularity
from .modality_axis import apply_missing_rate, apply_modality_noniid
from .result import (
    AxisReport,
    PartitionResult,
    compute_axis_report,
    label_histogram,
    shards_from_assignment,
)
from .scenario import (
    LabelMode,
    ModalityMode,
    ScenarioConfig,
    TopologyMode,
    build_scenario,
    label_assignment,
)
from .storage import load_partition, save_partition
from .topology_axis import TopologyAxis, apply_topology_axis

__all__ = (
    "AxisReport",
    "InsufficientLabelsError",
    "InvalidClientCount",
    "InvalidScenarioParams",
    "LabelMode",
    "ModalityCountError",
    "ModalityMode",
    "ModularityDecreased",
    "PartitionException",
    "PartitionResult",
    "PartitionStorageError",
    "ScenarioConfig",
    "TopologyAxis",
    "TopologyMode",
    "apply_missing_rate",
    "apply_modality_noniid",
    "apply_topology_axis",
    "balanced_greedy_assignment",
    "build_scenario",
    "compute_axis_report",
    "dirichlet_proportions",
    "label_assignment",
    "label_dirichlet_assignment",
    "label_histogram",
    "label_iid_assignment",
    "largest_remainder_counts",
    "load_partition",
    "louvain",
    "louvain_assignment",
    "modularity",
    "partition_balanced_greedy",
    "partition_by_labels_louvain",
    "partition_label_dirichlet",
    "partition_label_iid",
    "save_partition",
    "shards_from_assignment",
)
