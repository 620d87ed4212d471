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

from typing import Dict, Optional, Union

import numpy as np

from mmgraph import UNLABELED, MultimodalGraph, derive_seed, make_rng

from .errors import InvalidGeneratorParams, MissingLabelsError
from .generators import generate_rdpg, generate_sbm
from .log import log
from .params import FeatureSynthParams, RdpgParams, SbmParams

__all__ = ("synthesize_features", "synthesize_dataset")


def synthesize_features(
    graph: MultimodalGraph, params: FeatureSynthParams, seed: int
) -> MultimodalGraph:
    """
    Replace the graph's modalities with class-conditioned Gaussian features.

    Row ``i`` of modality ``m`` is drawn from ``N(means[m][y_i], sigma^2 I)``.
    All modalities are marked present.

    Raises
    ------
    MissingLabelsError
        When the graph has no labels or some node is unlabeled.
    InvalidGeneratorParams
        When a label has no class mean.
    """
    labels = graph.labels
    if labels is None or (labels == UNLABELED).any():
        raise MissingLabelsError("Feature synthesis needs a label for every node")
    if labels.size and labels.max() >= params.num_classes:
        raise InvalidGeneratorParams(
            f"Label {int(labels.max())} has no class mean,"
            f" params describe {params.num_classes} classes"
        )
    rng = make_rng(seed)
    features: Dict[str, np.ndarray] = {}
    for modality in params.modalities:
        noise = rng.standard_normal((graph.num_nodes, modality.feature_dim))
        rows = params.means[modality.name][labels] + params.sigma * noise
        features[modality.name] = rows.astype(np.float32)
    mask = np.ones((graph.num_nodes, len(params.modalities)), dtype=bool)
    return graph.with_features(features, params.modalities, mask)


def synthesize_dataset(
    topology: Union[SbmParams, RdpgParams],
    features: FeatureSynthParams,
    seed: int,
    labels: Optional[np.ndarray] = None,
) -> MultimodalGraph:
    """
    Generate topology and features of a synthetic dataset in one call.

    SBM graphs are labelled by block. RDPG graphs carry no labels
    of their own, so ``labels`` has to be passed for them.
    """
    if isinstance(topology, SbmParams):
        graph = generate_sbm(topology)
    else:
        if labels is None:
            raise MissingLabelsError("RDPG datasets need explicit node labels")
        graph = generate_rdpg(topology).with_labels(labels, features.num_classes)
    graph = synthesize_features(graph, features, derive_seed(seed, "features"))
    log.info(
        "Synthesized dataset: %s nodes, %s edges, %s classes, modalities %s",
        graph.num_nodes,
        graph.num_edges,
        graph.num_classes,
        ", ".join(graph.modality_names),
    )
    return graph
