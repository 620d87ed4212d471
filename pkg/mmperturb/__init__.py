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

"""Robustness perturbations of graphs, labels, features and modalities."""

from .errors import (
    InvalidRatio,
    InvalidSweep,
    MissingTargetModality,
    PerturbException,
    SingleClassError,
)
from .features import feature_noise, modality_missing
from .labels import label_noise, label_sparsify
from .spec import PerturbKind, PerturbSpec, apply_perturbation
from .sweep import RunnerHook, SweepPoint, sweep
from .topology import MAX_RATIO, RewireResult, edge_noise, edge_sparsify

__all__ = (
    "InvalidRatio",
    "InvalidSweep",
    "MAX_RATIO",
    "MissingTargetModality",
    "PerturbException",
    "PerturbKind",
    "PerturbSpec",
    "RewireResult",
    "RunnerHook",
    "SingleClassError",
    "SweepPoint",
    "apply_perturbation",
    "edge_noise",
    "edge_sparsify",
    "feature_noise",
    "label_noise",
    "label_sparsify",
    "modality_missing",
    "sweep",
)
