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

"""Synthetic multimodal graph generation and topology reconstruction."""

from .errors import (
    EmptyBlockError,
    InvalidGeneratorParams,
    LatentDimensionMismatch,
    MissingLabelsError,
    SynthException,
)
from .features import synthesize_dataset, synthesize_features
from .generators import generate_rdpg, generate_sbm, sample_edges
from .params import (
    FeatureSynthParams,
    RdpgParams,
    SbmParams,
    TopologyFitParams,
    TopologyMethod,
)
from .reconstruct import class_latent_positions, reconstruct_topology

__all__ = (
    "EmptyBlockError",
    "FeatureSynthParams",
    "InvalidGeneratorParams",
    "LatentDimensionMismatch",
    "MissingLabelsError",
    "RdpgParams",
    "SbmParams",
    "SynthException",
    "TopologyFitParams",
    "TopologyMethod",
    "class_latent_positions",
    "generate_rdpg",
    "generate_sbm",
    "reconstruct_topology",
    "sample_edges",
    "synthesize_dataset",
    "synthesize_features",
)
