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

from typing import Callable, Optional, Sequence

import numpy as np
import pytest

from mmgraph import Modality, MultimodalGraph, canonicalize, make_rng
from mmsynth import FeatureSynthParams, SbmParams, synthesize_dataset

TEXT = Modality("text", 4)
IMAGE = Modality("image", 3)


def build_graph(
    num_nodes: int,
    edges: Sequence[Sequence[int]],
    *,
    modalities: Sequence[Modality] = (TEXT, IMAGE),
    labels: Optional[Sequence[int]] = None,
    num_classes: int = 0,
    seed: int = 0,
) -> MultimodalGraph:
    rng = make_rng(seed)
    features = {
        m.name: rng.standard_normal((num_nodes, m.feature_dim)) for m in modalities
    }
    if labels is not None and not num_classes:
        num_classes = int(max(labels)) + 1
    return canonicalize(
        MultimodalGraph(
            num_nodes=num_nodes,
            edges=np.asarray(edges, dtype=np.int64).reshape(-1, 2),
            modalities=tuple(modalities),
            features=features,
            labels=None if labels is None else np.asarray(labels),
            num_classes=num_classes,
        )
    )


def sbm_dataset(
    block_sizes: Sequence[int] = (20, 20, 20),
    intra_p: float = 0.3,
    inter_p: float = 0.02,
    *,
    modalities: Sequence[Modality] = (TEXT, IMAGE),
    informative: Optional[Sequence[str]] = None,
    separation: float = 3.0,
    sigma: float = 1.0,
    seed: int = 0,
) -> MultimodalGraph:
    features = FeatureSynthParams.class_separated(
        len(block_sizes),
        modalities,
        informative_modalities=(
            [m.name for m in modalities] if informative is None else informative
        ),
        separation=separation,
        sigma=sigma,
        seed=seed,
    )
    topology = SbmParams(tuple(block_sizes), intra_p, inter_p, seed=seed)
    return synthesize_dataset(topology, features, seed)


@pytest.fixture
def triangle_pair() -> MultimodalGraph:
    """Two disjoint triangles labelled by triangle."""
    return build_graph(
        6,
        [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)],
        labels=[0, 0, 0, 1, 1, 1],
    )


@pytest.fixture
def small_sbm() -> MultimodalGraph:
    return sbm_dataset()


@pytest.fixture
def graph_factory() -> Callable[..., MultimodalGraph]:
    return build_graph
