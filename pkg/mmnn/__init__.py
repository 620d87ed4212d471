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

"""Hand-differentiated graph neural network backbones, losses and optimizers."""

from .batch import Batch, make_batch, normalize_adjacency
from .errors import (
    BatchTooSmall,
    EmptyMaskError,
    InvalidMaskFraction,
    InvalidModelSpec,
    LayoutMismatch,
    NNException,
    NoPositiveEdges,
    NonFiniteGradient,
    ShapeMismatch,
)
from .gradcheck import LossFn, grad_check
from .losses import (
    DEFAULT_TEMPERATURE,
    loss_contrastive,
    loss_link_prediction,
    loss_masked_reconstruction,
    loss_node_classification,
    normalize_rows,
    sample_masked_nodes,
    sample_negative_edges,
)
from .model import ForwardResult, backward, forward
from .optim import (
    SGD,
    Adam,
    Optimizer,
    OptimizerConfig,
    OptimizerKind,
    adam_step,
    check_finite,
    make_optimizer,
    sgd_step,
)
from .params import ParamLayout, ParamVector, Segment
from .spec import Architecture, Fusion, ModelSpec, init_params

__all__ = (
    "Adam",
    "Architecture",
    "Batch",
    "BatchTooSmall",
    "DEFAULT_TEMPERATURE",
    "EmptyMaskError",
    "ForwardResult",
    "Fusion",
    "InvalidMaskFraction",
    "InvalidModelSpec",
    "LayoutMismatch",
    "LossFn",
    "ModelSpec",
    "NNException",
    "NoPositiveEdges",
    "NonFiniteGradient",
    "Optimizer",
    "OptimizerConfig",
    "OptimizerKind",
    "ParamLayout",
    "ParamVector",
    "SGD",
    "Segment",
    "ShapeMismatch",
    "adam_step",
    "backward",
    "check_finite",
    "forward",
    "grad_check",
    "init_params",
    "loss_contrastive",
    "loss_link_prediction",
    "loss_masked_reconstruction",
    "loss_node_classification",
    "make_batch",
    "make_optimizer",
    "normalize_adjacency",
    "normalize_rows",
    "sample_masked_nodes",
    "sample_negative_edges",
    "sgd_step",
)
