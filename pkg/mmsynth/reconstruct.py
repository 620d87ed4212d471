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

"""Label-driven topology reconstruction for shards without usable edges."""

from typing import Optional

import numpy as np

from mmgraph import UNLABELED, make_rng

from .errors import MissingLabelsError
from .generators import sample_edges
from .params import TopologyFitParams, TopologyMethod

__all__ = ("class_latent_positions", "reconstruct_topology")


def class_latent_positions(
    labels: np.ndarray,
    num_classes: int,
    scale: float,
    noise: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """
    One-hot class embeddings scaled by ``sqrt(scale)`` plus ``U(0, noise)``.

    Same-class dot products come out near ``scale`` and cross-class ones
    near zero. Unlabeled nodes start from the zero vector. The result is
    clipped to ``[0, 1]``.
    """
    positions = np.zeros((labels.shape[0], max(num_classes, 1)), dtype=np.float64)
    labeled = np.flatnonzero(labels != UNLABELED)
    positions[labeled, labels[labeled]] = np.sqrt(scale)
    positions += rng.uniform(0.0, noise, size=positions.shape)
    return np.clip(positions, 0.0, 1.0)


def reconstruct_topology(
    labels: Optional[np.ndarray],
    method: TopologyMethod,
    fit_params: TopologyFitParams,
    seed: int,
    num_classes: Optional[int] = None,
) -> np.ndarray:
    """
    Build a fresh edge list for one shard from its node labels.

    The SBM path uses label groups as blocks with ``intra_p``/``inter_p``,
    the RDPG path samples from `class_latent_positions()`. Unlabeled nodes
    belong to no block, so their pairs are cross-block pairs.

    Returns
    -------
    numpy.ndarray
        ``(m, 2)`` canonical edge list over local node ids.

    Raises
    ------
    MissingLabelsError
        When ``labels`` is None.
    """
    if labels is None:
        raise MissingLabelsError("Topology reconstruction needs node labels")
    labels = np.asarray(labels, dtype=np.int64)
    n = labels.shape[0]
    if n <= 1:
        return np.empty((0, 2), dtype=np.int64)
    rng = make_rng(seed)
    if method is TopologyMethod.SBM:
        same = (labels[:, None] == labels[None, :]) & (labels[:, None] != UNLABELED)
        probabilities = np.where(same, fit_params.intra_p, fit_params.inter_p)
    else:
        if num_classes is None:
            num_classes = int(labels.max()) + 1
        positions = class_latent_positions(
            labels, num_classes, fit_params.intra_p, fit_params.rdpg_noise, rng
        )
        probabilities = np.clip(positions @ positions.T, 0.0, 1.0)
    # pairs come out of the upper triangle, already sorted and u < v
    return sample_edges(probabilities, rng)
