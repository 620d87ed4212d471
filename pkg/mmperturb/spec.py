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

import dataclasses
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence

from mmgraph import ClientShard, derive_seed

from .errors import InvalidRatio, MissingTargetModality
from .features import feature_noise, modality_missing
from .labels import label_noise, label_sparsify
from .log import log
from .topology import MAX_RATIO, check_ratio, edge_noise, edge_sparsify

__all__ = ("PerturbKind", "PerturbSpec", "apply_perturbation")


class PerturbKind(Enum):
    EDGE_NOISE = "edge_noise"
    EDGE_SPARSIFY = "edge_sparsify"
    LABEL_NOISE = "label_noise"
    LABEL_SPARSIFY = "label_sparsify"
    FEATURE_NOISE = "feature_noise"
    MODALITY_MISSING = "modality_missing"


@dataclass(frozen=True)
class PerturbSpec:
    """
    One perturbation setting.

    Attributes
    ----------
    kind: `PerturbKind`
        Perturbation operator.
    ratio: `float`
        Perturbed fraction in ``[0, 0.9]``; the missing rate in ``[0, 1]``
        for ``modality_missing``. For ``feature_noise`` the noise standard
        deviation is ``ratio * sigma``.
    seed: `int`
        Seed every per-client seed derives from.
    sigma: `float`
        Noise scale of ``feature_noise``.
    target_modality: `str`, optional
        Modality hidden by ``modality_missing``.
    """

    kind: PerturbKind
    ratio: float = 0.0
    seed: int = 0
    sigma: float = 1.0
    target_modality: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind is PerturbKind.MODALITY_MISSING:
            check_ratio(self.kind.value, self.ratio, 1.0)
            if self.target_modality is None:
                raise MissingTargetModality("modality_missing needs a target modality")
        elif self.kind is PerturbKind.FEATURE_NOISE:
            if not self.ratio >= 0 or not self.sigma >= 0:
                raise InvalidRatio(
                    self.kind.value, self.ratio * self.sigma, 0.0, float("inf")
                )
        else:
            check_ratio(self.kind.value, self.ratio, MAX_RATIO)

    def with_seed(self, seed: int) -> PerturbSpec:
        return dataclasses.replace(self, seed=seed)


def apply_perturbation(
    shards: Sequence[ClientShard], spec: PerturbSpec
) -> List[ClientShard]:
    """
    Apply ``spec`` to every shard, each client with its own derived seed.

    The input shards are never modified.
    """
    kind = spec.kind
    if kind is PerturbKind.MODALITY_MISSING:
        assert spec.target_modality is not None, "mypy"
        return list(
            modality_missing(shards, spec.target_modality, spec.ratio, spec.seed)
        )
    result = []
    for shard in shards:
        seed = derive_seed(spec.seed, kind.value, shard.client_id)
        if kind is PerturbKind.EDGE_NOISE:
            rewired = edge_noise(shard.graph, spec.ratio, seed)
            shard = shard.with_graph(rewired.graph)
        elif kind is PerturbKind.EDGE_SPARSIFY:
            shard = shard.with_graph(edge_sparsify(shard.graph, spec.ratio, seed))
        elif kind is PerturbKind.LABEL_NOISE:
            shard = shard.with_graph(label_noise(shard.graph, spec.ratio, seed))
        elif kind is PerturbKind.LABEL_SPARSIFY:
            shard = label_sparsify(shard, spec.ratio, seed)
        else:
            sigma = spec.ratio * spec.sigma
            shard = shard.with_graph(feature_noise(shard.graph, sigma, seed))
        result.append(shard)
    log.debug(
        "Applied %s at ratio %s to %s shards", kind.value, spec.ratio, len(result)
    )
    return result
