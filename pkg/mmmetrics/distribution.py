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

"""Feature distribution shift between clients."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from mmgraph import ClientShard

from .errors import EmptyInputError, InvalidMetricArgument

__all__ = (
    "FeatureHistogramSet",
    "FeatureDivergence",
    "feature_histograms",
    "feature_kl",
)


@dataclass(frozen=True, eq=False)
class FeatureHistogramSet:
    """
    Smoothed per-client, per-dimension histograms over shared bins.

    Attributes
    ----------
    bins: `int`
        Bin count B.
    eps: `float`
        Additive smoothing mass per bin before normalization.
    histograms: `dict`
        Modality name -> ``(K, d, B)`` array, each ``[k, j]`` row sums to 1.
    global_histograms: `dict`
        Modality name -> ``(d, B)`` histograms of all clients' rows pooled.
    present: `dict`
        Modality name -> ``(K,)`` bool, whether client k holds any row.
    degenerate: `dict`
        Modality name -> ``(d,)`` bool, dimensions with zero global range.
    """

    bins: int
    eps: float
    histograms: Dict[str, np.ndarray]
    global_histograms: Dict[str, np.ndarray]
    present: Dict[str, np.ndarray]
    degenerate: Dict[str, np.ndarray]


@dataclass(frozen=True, eq=False)
class FeatureDivergence:
    """
    KL(client || global) per client plus KL(client_i || client_j) for all pairs.

    Values are averaged over dimensions and modalities.
    """

    per_client: np.ndarray
    pairwise: np.ndarray
    direction: str = "client||global"

    @property
    def mean(self) -> float:
        return float(self.per_client.mean()) if self.per_client.size else 0.0


def _smoothed(counts: np.ndarray, eps: float) -> np.ndarray:
    counts = counts + eps
    return counts / counts.sum(axis=-1, keepdims=True)


def feature_histograms(
    shards: Sequence[ClientShard], bins: int = 32, eps: float = 1e-6
) -> FeatureHistogramSet:
    if bins < 1 or eps <= 0:
        raise InvalidMetricArgument("Histograms need bins >= 1 and eps > 0")
    if not shards:
        raise EmptyInputError("Feature histograms need at least one client")
    modalities = shards[0].graph.modalities
    histograms: Dict[str, np.ndarray] = {}
    global_histograms: Dict[str, np.ndarray] = {}
    present: Dict[str, np.ndarray] = {}
    degenerate: Dict[str, np.ndarray] = {}
    for idx, modality in enumerate(modalities):
        rows: List[np.ndarray] = []
        for shard in shards:
            mask = shard.graph.modality_mask
            assert mask is not None, "mypy"
            rows.append(shard.graph.features[modality.name][mask[:, idx]])
        pooled = np.concatenate(rows).astype(np.float64)
        dim = modality.feature_dim
        if pooled.shape[0]:
            low, high = pooled.min(axis=0), pooled.max(axis=0)
        else:
            low = high = np.zeros(dim)
        span = high - low
        degenerate[modality.name] = span <= 0
        safe_span = np.where(span > 0, span, 1.0)

        counts = np.zeros((len(shards), dim, bins), dtype=np.float64)
        for k, client_rows in enumerate(rows):
            cells = np.floor((client_rows - low) / safe_span * bins).astype(np.int64)
            cells = np.clip(cells, 0, bins - 1)
            for j in range(dim):
                counts[k, j] = np.bincount(cells[:, j], minlength=bins)
        histograms[modality.name] = _smoothed(counts, eps)
        global_histograms[modality.name] = _smoothed(counts.sum(axis=0), eps)
        present[modality.name] = np.array([r.shape[0] > 0 for r in rows])
    return FeatureHistogramSet(
        bins=bins,
        eps=eps,
        histograms=histograms,
        global_histograms=global_histograms,
        present=present,
        degenerate=degenerate,
    )


def _kl(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.sum(p * np.log(p / q), axis=-1)


def feature_kl(
    shards: Sequence[ClientShard], bins: int = 32, eps: float = 1e-6
) -> FeatureDivergence:
    """
    Histogram KL divergence of every client's features from the global ones.

    Bins span the global min/max of each dimension. Masked rows are left
    out, zero-range dimensions contribute 0 and a modality a client doesn't
    hold at all is skipped for that client.
    """
    hists = feature_histograms(shards, bins, eps)
    k = len(shards)
    per_client_sum = np.zeros(k)
    per_client_n = np.zeros(k)
    pair_sum = np.zeros((k, k))
    pair_n = np.zeros((k, k))
    for name, client_hists in hists.histograms.items():
        live = ~hists.degenerate[name]
        present = hists.present[name]
        divergence = _kl(client_hists, hists.global_histograms[name])
        to_global = np.where(live, divergence, 0.0)
        per_client_sum += np.where(present, to_global.mean(axis=1), 0.0)
        per_client_n += present
        # (K, K, d): KL(client_i || client_j) per dimension
        pairs = _kl(client_hists[:, None], client_hists[None, :])
        pairs = np.where(live, pairs, 0.0).mean(axis=2)
        both = present[:, None] & present[None, :]
        pair_sum += np.where(both, pairs, 0.0)
        pair_n += both
    return FeatureDivergence(
        per_client=np.divide(
            per_client_sum, per_client_n, out=np.zeros(k), where=per_client_n > 0
        ),
        pairwise=np.divide(pair_sum, pair_n, out=np.zeros((k, k)), where=pair_n > 0),
    )
