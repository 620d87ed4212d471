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

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Mapping, Sequence, Tuple

import numpy as np

from mmgraph import Modality, make_rng

from .errors import EmptyBlockError, InvalidGeneratorParams
from .log import log

__all__ = (
    "TopologyMethod",
    "SbmParams",
    "RdpgParams",
    "TopologyFitParams",
    "FeatureSynthParams",
)


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise InvalidGeneratorParams(f"{name} has to be in [0, 1], got {value}")


class TopologyMethod(Enum):
    SBM = "sbm"
    RDPG = "rdpg"


@dataclass(frozen=True)
class SbmParams:
    block_sizes: Tuple[int, ...]
    intra_p: float
    inter_p: float
    seed: int = 0

    def __post_init__(self) -> None:
        sizes = tuple(int(size) for size in self.block_sizes)
        if not sizes or min(sizes) < 1:
            raise EmptyBlockError(f"SBM blocks have to be non-empty, got {sizes}")
        object.__setattr__(self, "block_sizes", sizes)
        _check_probability("intra_p", self.intra_p)
        _check_probability("inter_p", self.inter_p)
        if self.inter_p > self.intra_p:
            log.warning(
                "SBM inter_p (%s) exceeds intra_p (%s), the graph is heterophilous",
                self.inter_p,
                self.intra_p,
            )

    @property
    def num_nodes(self) -> int:
        return sum(self.block_sizes)


@dataclass(frozen=True, eq=False)
class RdpgParams:
    latent_dim: int
    latent_positions: np.ndarray
    seed: int = 0

    def __post_init__(self) -> None:
        positions = np.array(self.latent_positions, dtype=np.float64, copy=True)
        if positions.size and (positions.min() < 0.0 or positions.max() > 1.0):
            raise InvalidGeneratorParams("RDPG latent positions have to be in [0, 1]")
        positions.setflags(write=False)
        object.__setattr__(self, "latent_positions", positions)


@dataclass(frozen=True)
class TopologyFitParams:
    """
    Parameters of topology reconstruction for topology-unavailable shards.

    Attributes
    ----------
    intra_p: `float`
        Same-label edge probability (SBM), same-label dot product (RDPG).
    inter_p: `float`
        Cross-label edge probability (SBM only).
    rdpg_noise: `float`
        Upper bound of the uniform noise added to RDPG latent positions.
    """

    intra_p: float = 0.1
    inter_p: float = 0.01
    rdpg_noise: float = 0.05

    def __post_init__(self) -> None:
        _check_probability("intra_p", self.intra_p)
        _check_probability("inter_p", self.inter_p)
        if not 0.0 <= self.rdpg_noise <= 1.0:
            raise InvalidGeneratorParams(
                f"rdpg_noise has to be in [0, 1], got {self.rdpg_noise}"
            )


@dataclass(frozen=True, eq=False)
class FeatureSynthParams:
    """
    Class-conditioned Gaussian feature model.

    Attributes
    ----------
    modalities: `tuple` of `Modality`
        Modalities to synthesize, in graph order.
    means: `dict`
        Modality name -> ``(num_classes, feature_dim)`` class mean table.
    sigma: `float`
        Shared isotropic standard deviation.
    informative_modalities: `tuple` of `str`
        Modalities whose class means differ between classes.
    """

    modalities: Tuple[Modality, ...]
    means: Mapping[str, np.ndarray]
    sigma: float
    informative_modalities: Tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise InvalidGeneratorParams(f"sigma has to be positive, got {self.sigma}")
        means: Dict[str, np.ndarray] = {}
        num_classes = None
        for modality in self.modalities:
            try:
                table = np.array(self.means[modality.name], dtype=np.float64, copy=True)
            except KeyError:
                raise InvalidGeneratorParams(
                    f"No class means for modality {modality.name!r}"
                ) from None
            if table.ndim != 2 or table.shape[1] != modality.feature_dim:
                raise InvalidGeneratorParams(
                    f"Means of {modality.name!r} have shape {table.shape},"
                    f" expected (num_classes, {modality.feature_dim})"
                )
            if num_classes is not None and table.shape[0] != num_classes:
                raise InvalidGeneratorParams(
                    "Every modality needs the same number of class means"
                )
            num_classes = table.shape[0]
            table.setflags(write=False)
            means[modality.name] = table
        object.__setattr__(self, "modalities", tuple(self.modalities))
        object.__setattr__(self, "means", means)
        object.__setattr__(
            self, "informative_modalities", tuple(self.informative_modalities)
        )

    @property
    def num_classes(self) -> int:
        if not self.modalities:
            return 0
        return int(self.means[self.modalities[0].name].shape[0])

    @classmethod
    def class_separated(
        cls,
        num_classes: int,
        modalities: Sequence[Modality],
        *,
        informative_modalities: Sequence[str],
        separation: float,
        sigma: float,
        seed: int,
    ) -> FeatureSynthParams:
        """
        Build a mean table with class-separated informative modalities.

        Informative modalities get one random direction of norm ``separation``
        per class. Every class shares the zero mean on the other modalities,
        which then carry pure noise.
        """
        names = [m.name for m in modalities]
        unknown = set(informative_modalities) - set(names)
        if unknown:
            raise InvalidGeneratorParams(
                f"Informative modalities {sorted(unknown)} are not declared"
            )
        rng = make_rng(seed)
        means = {}
        for modality in modalities:
            if modality.name in informative_modalities:
                directions = rng.standard_normal((num_classes, modality.feature_dim))
                norms = np.linalg.norm(directions, axis=1, keepdims=True)
                unit = directions / np.maximum(norms, 1e-12)
                means[modality.name] = separation * unit
            else:
                means[modality.name] = np.zeros((num_classes, modality.feature_dim))
        return cls(
            modalities=tuple(modalities),
            means=means,
            sigma=sigma,
            informative_modalities=tuple(informative_modalities),
        )
