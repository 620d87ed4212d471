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

"""Federated protocol engine, reference aggregators and learning tasks."""

from .aggregators import (
    ClientUpdate,
    aggregate_fedavg,
    aggregate_prototypes,
    compute_prototypes,
    fedprox_hook,
    local_update_fedprox,
    local_update_scaffold,
    prototype_hook,
    scaffold_control_update,
    scaffold_hook,
    scaffold_server_update,
)
from .engine import (
    EvalHook,
    RoundRecord,
    evaluate,
    fedproto_round,
    macro_average,
    make_eval_hook,
    run_round,
    sample_clients,
)
from .errors import (
    ClientDivergedError,
    EmptyAggregation,
    FederationException,
    InvalidStepBudget,
    NoClassSamplesError,
    PayloadError,
    TaskMismatch,
)
from .local import GradHook, local_train, local_train_early_stopping
from .payload import (
    HEADER_BYTES,
    decode_params,
    decode_prototypes,
    encode_params,
    encode_prototypes,
    param_payload_size,
    prototype_payload_size,
)
from .pipeline import (
    FederatedRun,
    LocalReport,
    TwoStageReport,
    evaluate_locally,
    run_federated,
    run_isolated,
    run_two_stage,
)
from .state import (
    AggregatorConfig,
    AggregatorKind,
    ClientState,
    FederationConfig,
    ServerState,
    init_clients,
    init_server,
)
from .tasks import (
    ClientData,
    EdgeSplit,
    HiddenHook,
    LinkPrediction,
    MaskedReconstruction,
    ModalityContrastive,
    NodeClassification,
    SelfSupervised,
    Task,
    split_edges,
)

__all__ = (
    "AggregatorConfig",
    "AggregatorKind",
    "ClientData",
    "ClientDivergedError",
    "ClientState",
    "ClientUpdate",
    "EdgeSplit",
    "EmptyAggregation",
    "EvalHook",
    "FederatedRun",
    "FederationConfig",
    "FederationException",
    "GradHook",
    "HEADER_BYTES",
    "HiddenHook",
    "InvalidStepBudget",
    "LinkPrediction",
    "LocalReport",
    "MaskedReconstruction",
    "ModalityContrastive",
    "NoClassSamplesError",
    "NodeClassification",
    "PayloadError",
    "RoundRecord",
    "SelfSupervised",
    "ServerState",
    "Task",
    "TaskMismatch",
    "TwoStageReport",
    "aggregate_fedavg",
    "aggregate_prototypes",
    "compute_prototypes",
    "decode_params",
    "decode_prototypes",
    "encode_params",
    "encode_prototypes",
    "evaluate",
    "evaluate_locally",
    "fedproto_round",
    "fedprox_hook",
    "init_clients",
    "init_server",
    "local_train",
    "local_train_early_stopping",
    "local_update_fedprox",
    "local_update_scaffold",
    "macro_average",
    "make_eval_hook",
    "param_payload_size",
    "prototype_hook",
    "prototype_payload_size",
    "run_federated",
    "run_isolated",
    "run_round",
    "run_two_stage",
    "sample_clients",
    "scaffold_control_update",
    "scaffold_hook",
    "scaffold_server_update",
    "split_edges",
)
