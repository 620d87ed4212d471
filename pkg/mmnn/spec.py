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

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence, Tuple

import numpy as np

from mmgraph import Modality, make_rng

from .errors import InvalidModelSpec
from .params import ParamLayout, ParamVector

__all__ = ("Architecture", "Fusion", "ModelSpec", "init_params")


class Architecture(Enum):
    MLP = "mlp"
    GCN = "gcn"
    MMGCN = "mmgcn"


class Fusion(Enum):
    CONCAT = "concat"
    MASKED_MEAN = "masked_mean"


@dataclass(frozen=True)
class ModelSpec:
    """
    Architecture and layer sizes of a backbone.

    MLP and GCN read the concatenation of every modality. MMGCN runs one
    GCN stack per modality and fuses the branch outputs. All hidden layers
    use ReLU and the ``head`` layer is linear.

    Attributes
    ----------
    architecture: `Architecture`
        Backbone family.
    modalities: `tuple` of `Modality`
        Input modalities, in graph order.
    hidden: `tuple` of `int`
        Hidden layer widths; the last one is the embedding width.
    output_dim: `int`
        Width of the head (class count, or link embedding width).
    fusion: `Fusion`
        Branch fusion of MMGCN, ignored otherwise.
    reconstruction: `bool`
        Whether to add a linear ``recon`` head from embeddings back to inputs.
    """

    architecture: Architecture
    modalities: Tuple[Modality, ...]
    hidden: Tuple[int, ...]
    output_dim: int
    fusion: Fusion = Fusion.MASKED_MEAN
    reconstruction: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "modalities", tuple(self.modalities))
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        if not self.modalities:
            raise InvalidModelSpec("A model needs at least one input modality")
        if not self.hidden or min(self.hidden) < 1:
            raise InvalidModelSpec(
                f"Hidden widths have to be positive and non-empty, got {self.hidden}"
            )
        if self.output_dim < 1:
            raise InvalidModelSpec(
                f"output_dim has to be positive, got {self.output_dim}"
            )

    @property
    def input_dim(self) -> int:
        return sum(m.feature_dim for m in self.modalities)

    @property
    def embedding_dim(self) -> int:
        """Width of the embedding that feeds the head."""
        if self.architecture is Architecture.MMGCN and self.fusion is Fusion.CONCAT:
            return self.hidden[-1] * len(self.modalities)
        return self.hidden[-1]

    @property
    def propagates(self) -> bool:
        return self.architecture is not Architecture.MLP

    def layout(self) -> ParamLayout:
        shapes: List[Tuple[str, Tuple[int, ...]]] = []

        def stack(prefix: str, dims: Sequence[int]) -> None:
            for idx, (fan_in, fan_out) in enumerate(zip(dims[:-1], dims[1:])):
                shapes.append((f"{prefix}layer{idx}.weight", (fan_in, fan_out)))
                shapes.append((f"{prefix}layer{idx}.bias", (fan_out,)))

        if self.architecture is Architecture.MMGCN:
            for modality in self.modalities:
                stack(f"{modality.name}.", [modality.feature_dim, *self.hidden])
        else:
            stack("", [self.input_dim, *self.hidden])
        shapes.append(("head.weight", (self.embedding_dim, self.output_dim)))
        shapes.append(("head.bias", (self.output_dim,)))
        if self.reconstruction:
            shapes.append(("recon.weight", (self.embedding_dim, self.input_dim)))
            shapes.append(("recon.bias", (self.input_dim,)))
        return ParamLayout.from_shapes(shapes)


def init_params(spec: ModelSpec, seed: int) -> ParamVector:
    """Glorot-uniform weights drawn in layout order, zero biases."""
    rng = make_rng(seed)
    params = ParamVector.zeros(spec.layout())
    for segment in params.layout:
        if segment.name.endswith(".weight"):
            fan_in, fan_out = segment.shape
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            params.view(segment.name)[...] = rng.uniform(-limit, limit, segment.shape)
    return params
