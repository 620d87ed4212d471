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

"""
Forward and backward passes of the MLP, GCN and MMGCN backbones.

Backpropagation is written out by hand for the fixed set of layers. Every
layer computes ``act(P W + b)`` where ``P`` is the layer input, propagated
through the normalized adjacency for graph layers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, NamedTuple, Optional

import numpy as np
import scipy.sparse as sp

from .batch import Batch
from .errors import ShapeMismatch
from .params import ParamVector
from .spec import Architecture, Fusion, ModelSpec

__all__ = ("ForwardResult", "forward", "backward")


class _LayerCache(NamedTuple):
    name: str
    propagated: np.ndarray
    pre_activation: np.ndarray
    relu: bool


@dataclass(frozen=True, eq=False)
class ForwardResult:
    """
    Outputs of one forward pass.

    Attributes
    ----------
    output: `numpy.ndarray`
        Head output (class logits or link embeddings).
    hidden: `numpy.ndarray`
        Embedding that feeds the head: last hidden layer for MLP/GCN,
        fused branch embedding for MMGCN.
    branches: `dict`
        Modality name -> branch embedding (MMGCN only).
    """

    output: np.ndarray
    hidden: np.ndarray
    branches: Dict[str, np.ndarray] = field(default_factory=dict)
    _trunk: List[_LayerCache] = field(default_factory=list, repr=False)
    _branch_caches: Dict[str, List[_LayerCache]] = field(
        default_factory=dict, repr=False
    )
    _head: Optional[_LayerCache] = field(default=None, repr=False)
    _fusion_weights: Optional[np.ndarray] = field(default=None, repr=False)


def _propagate(adjacency: Optional[sp.csr_matrix], h: np.ndarray) -> np.ndarray:
    if adjacency is None:
        return h
    return np.asarray(adjacency @ h, dtype=h.dtype)


def _layer(
    params: ParamVector,
    name: str,
    h: np.ndarray,
    adjacency: Optional[sp.csr_matrix],
    relu: bool,
) -> tuple[np.ndarray, _LayerCache]:
    weight = params.view(f"{name}.weight")
    if h.shape[1] != weight.shape[0]:
        raise ShapeMismatch(
            f"Layer {name!r} expects {weight.shape[0]} input columns, got {h.shape[1]}"
        )
    propagated = _propagate(adjacency, h)
    pre = propagated @ weight + params.view(f"{name}.bias")
    out = np.maximum(pre, 0.0) if relu else pre
    return out, _LayerCache(name, propagated, pre, relu)


def _stack(
    params: ParamVector,
    prefix: str,
    depth: int,
    h: np.ndarray,
    adjacency: Optional[sp.csr_matrix],
) -> tuple[np.ndarray, List[_LayerCache]]:
    caches = []
    for idx in range(depth):
        h, cache = _layer(params, f"{prefix}layer{idx}", h, adjacency, relu=True)
        caches.append(cache)
    return h, caches


def _fusion_weights(spec: ModelSpec, mask: np.ndarray, dtype: type) -> np.ndarray:
    weights = mask.astype(dtype)
    if spec.fusion is Fusion.MASKED_MEAN:
        weights = weights / np.maximum(weights.sum(axis=1, keepdims=True), 1.0)
    return weights


def forward(spec: ModelSpec, params: ParamVector, batch: Batch) -> ForwardResult:
    """
    Run the backbone on a full-graph batch.

    Raises
    ------
    mmnn.LayoutMismatch
        When ``params`` don't follow ``spec``'s layout.
    mmnn.ShapeMismatch
        When batch features don't match the declared modality widths.
    """
    params.check_layout(spec.layout())
    dtype = params.dtype.type
    adjacency = batch.adjacency.astype(dtype) if spec.propagates else None
    depth = len(spec.hidden)

    if spec.architecture is not Architecture.MMGCN:
        x = batch.stacked_input(dtype)
        hidden, trunk = _stack(params, "", depth, x, adjacency)
        output, head = _layer(params, "head", hidden, adjacency, relu=False)
        return ForwardResult(output, hidden, _trunk=trunk, _head=head)

    branches: Dict[str, np.ndarray] = {}
    caches: Dict[str, List[_LayerCache]] = {}
    for modality in spec.modalities:
        x = batch.modality_input(modality.name, dtype)
        branches[modality.name], caches[modality.name] = _stack(
            params, f"{modality.name}.", depth, x, adjacency
        )
    weights = _fusion_weights(spec, batch.modality_mask, dtype)
    parts = [
        branches[m.name] * weights[:, idx : idx + 1]
        for idx, m in enumerate(spec.modalities)
    ]
    if spec.fusion is Fusion.MASKED_MEAN:
        fused = np.sum(parts, axis=0)
    else:
        fused = np.concatenate(parts, axis=1)
    output, head = _layer(params, "head", fused, adjacency, relu=False)
    return ForwardResult(
        output,
        fused,
        branches,
        _branch_caches=caches,
        _head=head,
        _fusion_weights=weights,
    )


def _layer_backward(
    grads: ParamVector,
    params: ParamVector,
    cache: _LayerCache,
    d_out: np.ndarray,
    adjacency: Optional[sp.csr_matrix],
) -> np.ndarray:
    d_pre = d_out * (cache.pre_activation > 0) if cache.relu else d_out
    grads.view(f"{cache.name}.weight")[...] += cache.propagated.T @ d_pre
    grads.view(f"{cache.name}.bias")[...] += d_pre.sum(axis=0)
    d_propagated = d_pre @ params.view(f"{cache.name}.weight").T
    # the normalized adjacency is symmetric
    return _propagate(adjacency, d_propagated)


def _stack_backward(
    grads: ParamVector,
    params: ParamVector,
    caches: List[_LayerCache],
    d_out: np.ndarray,
    adjacency: Optional[sp.csr_matrix],
) -> None:
    for idx in range(len(caches) - 1, -1, -1):
        d_out = _layer_backward(grads, params, caches[idx], d_out, adjacency)


def backward(
    spec: ModelSpec,
    params: ParamVector,
    batch: Batch,
    result: ForwardResult,
    d_output: Optional[np.ndarray] = None,
    d_hidden: Optional[np.ndarray] = None,
    d_branches: Optional[Mapping[str, np.ndarray]] = None,
) -> ParamVector:
    """
    Gradient of a scalar loss with respect to every parameter.

    ``d_output``, ``d_hidden`` and ``d_branches`` are the loss gradients with
    respect to the matching `ForwardResult` fields; any of them may be None.
    """
    dtype = params.dtype.type
    adjacency = batch.adjacency.astype(dtype) if spec.propagates else None
    grads = params.zeros_like()
    assert result._head is not None, "mypy"
    if d_output is None:
        d_output = np.zeros_like(result.output)
    d_embedding = _layer_backward(grads, params, result._head, d_output, adjacency)
    if d_hidden is not None:
        d_embedding = d_embedding + d_hidden

    if spec.architecture is not Architecture.MMGCN:
        _stack_backward(grads, params, result._trunk, d_embedding, adjacency)
        return grads

    weights = result._fusion_weights
    assert weights is not None, "mypy"
    width = spec.hidden[-1]
    for idx, modality in enumerate(spec.modalities):
        if spec.fusion is Fusion.MASKED_MEAN:
            d_branch = d_embedding * weights[:, idx : idx + 1]
        else:
            d_branch = (
                d_embedding[:, idx * width : (idx + 1) * width]
                * weights[:, idx : idx + 1]
            )
        if d_branches is not None and modality.name in d_branches:
            d_branch = d_branch + d_branches[modality.name]
        _stack_backward(
            grads, params, result._branch_caches[modality.name], d_branch, adjacency
        )
    return grads
