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

from typing import Optional, Sequence, Tuple

import numpy as np

from mmgraph import ClientShard, MultimodalGraph, make_rng
from mmpartition import apply_missing_rate

from .errors import InvalidRatio

__all__ = ("feature_noise", "modality_missing")


def feature_noise(
    graph: MultimodalGraph,
    sigma: float,
    seed: int,
    modalities: Optional[Sequence[str]] = None,
) -> MultimodalGraph:
    """
    Add ``N(0, sigma^2)`` noise to every present feature row.

    Rows of modalities a node lacks stay zero. ``modalities`` limits the
    noise to some modalities, all of them by default.
    """
    if not sigma >= 0:
        raise InvalidRatio("feature_noise", sigma, 0.0, float("inf"))
    if sigma == 0:
        return graph
    names = graph.modality_names if modalities is None else tuple(modalities)
    mask = graph.modality_mask
    assert mask is not None, "mypy"
    rng = make_rng(seed)
    features = dict(graph.features)
    for name in graph.modality_names:
        if name not in names:
            continue
        present = mask[:, graph.modality_index(name)]
        matrix = features[name].astype(np.float64)
        noise = rng.normal(0.0, sigma, size=matrix.shape)
        matrix[present] += noise[present]
        features[name] = matrix.astype(np.float32)
    return graph.with_features(features)


def modality_missing(
    shards: Sequence[ClientShard], target_modality: str, rate: float, seed: int
) -> Tuple[ClientShard, ...]:
    """Hide ``target_modality`` on ``round(rate * n_k)`` nodes of every client."""
    if not 0.0 <= rate <= 1.0:
        raise InvalidRatio("modality_missing", rate, 0.0, 1.0)
    return apply_missing_rate(shards, target_modality, rate, seed)
