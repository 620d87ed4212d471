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
Task losses.

Every loss returns its value together with the gradient with respect to its
array inputs, ready to feed `mmnn.backward()`.
"""

from typing import Optional, Set, Tuple

import numpy as np
from scipy.special import expit, log_softmax, softmax

from mmgraph import make_rng, round_half_up

from .batch import Batch
from .errors import (
    BatchTooSmall,
    EmptyMaskError,
    InvalidMaskFraction,
    InvalidModelSpec,
    NoPositiveEdges,
    ShapeMismatch,
)
from .log import log
from .model import backward, forward
from .params import ParamVector
from .spec import ModelSpec

__all__ = (
    "DEFAULT_TEMPERATURE",
    "loss_node_classification",
    "loss_link_prediction",
    "loss_masked_reconstruction",
    "loss_contrastive",
    "sample_masked_nodes",
    "sample_negative_edges",
    "normalize_rows",
)

#: InfoNCE temperature.
DEFAULT_TEMPERATURE = 0.07

_NORM_EPS = 1e-8


def loss_node_classification(
    logits: np.ndarray, labels: np.ndarray, mask: np.ndarray
) -> Tuple[float, np.ndarray]:
    """
    Mean softmax cross-entropy over the nodes selected by ``mask``.

    Raises
    ------
    EmptyMaskError
        When ``mask`` selects no node.
    """
    selected = np.flatnonzero(mask)
    if not selected.size:
        raise EmptyMaskError("Node classification loss needs at least one masked node")
    log_probs = log_softmax(logits[selected], axis=1)
    targets = labels[selected]
    loss = -float(log_probs[np.arange(selected.size), targets].mean())
    grad = np.zeros_like(logits)
    d_selected = np.exp(log_probs)
    d_selected[np.arange(selected.size), targets] -= 1.0
    grad[selected] = d_selected / selected.size
    return loss, grad


def loss_link_prediction(
    embeddings: np.ndarray, pos_edges: np.ndarray, neg_edges: np.ndarray
) -> Tuple[float, np.ndarray]:
    """
    Binary cross-entropy of ``sigmoid(z_u . z_v)``, 1 for positives and 0 for
    negatives, averaged over all pairs.

    Raises
    ------
    NoPositiveEdges
        When ``pos_edges`` is empty.
    """
    pos_edges = np.asarray(pos_edges, dtype=np.int64).reshape(-1, 2)
    neg_edges = np.asarray(neg_edges, dtype=np.int64).reshape(-1, 2)
    if not pos_edges.shape[0]:
        raise NoPositiveEdges("Link prediction loss needs at least one positive edge")
    pairs = np.concatenate([pos_edges, neg_edges])
    targets = np.concatenate(
        [np.ones(pos_edges.shape[0]), np.zeros(neg_edges.shape[0])]
    )
    z_u = embeddings[pairs[:, 0]]
    z_v = embeddings[pairs[:, 1]]
    scores = np.sum(z_u * z_v, axis=1)
    loss = float(np.mean(np.logaddexp(0.0, scores) - targets * scores))
    d_scores = (expit(scores) - targets) / pairs.shape[0]
    grad = np.zeros_like(embeddings)
    np.add.at(grad, pairs[:, 0], d_scores[:, None] * z_v)
    np.add.at(grad, pairs[:, 1], d_scores[:, None] * z_u)
    return loss, grad


def normalize_rows(z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Rows divided by ``sqrt(|z|^2 + eps^2)``; returns the unit rows and the norms."""
    norms = np.sqrt(np.sum(z * z, axis=1, keepdims=True) + _NORM_EPS**2)
    return z / norms, norms


def _normalize_backward(
    unit: np.ndarray, norms: np.ndarray, d_unit: np.ndarray
) -> np.ndarray:
    return (d_unit - unit * np.sum(unit * d_unit, axis=1, keepdims=True)) / norms


def loss_contrastive(
    z_a: np.ndarray, z_b: np.ndarray, temperature: float = DEFAULT_TEMPERATURE
) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    Symmetric InfoNCE between two row-aligned embedding views.

    Rows are L2-normalized, row ``i`` of ``z_a`` is the positive of row
    ``i`` of ``z_b`` and every other row is a negative. The result is the
    mean of the a->b and b->a cross-entropies.

    Raises
    ------
    BatchTooSmall
        When fewer than two rows are given.
    """
    if z_a.shape != z_b.shape:
        raise ShapeMismatch(f"Views have shapes {z_a.shape} and {z_b.shape}")
    n = z_a.shape[0]
    if n < 2:
        raise BatchTooSmall(f"Contrastive loss needs at least 2 rows, got {n}")
    u_a, r_a = normalize_rows(z_a)
    u_b, r_b = normalize_rows(z_b)
    similarity = (u_a @ u_b.T) / temperature
    diagonal = np.arange(n)
    log_rows = log_softmax(similarity, axis=1)
    log_cols = log_softmax(similarity, axis=0)
    loss = -0.5 * float(
        log_rows[diagonal, diagonal].mean() + log_cols[diagonal, diagonal].mean()
    )

    d_rows = softmax(similarity, axis=1)
    d_rows[diagonal, diagonal] -= 1.0
    d_cols = softmax(similarity, axis=0)
    d_cols[diagonal, diagonal] -= 1.0
    d_similarity = (d_rows + d_cols) / (2.0 * n)
    d_u_a = d_similarity @ u_b / temperature
    d_u_b = d_similarity.T @ u_a / temperature
    return (
        loss,
        _normalize_backward(u_a, r_a, d_u_a),
        _normalize_backward(u_b, r_b, d_u_b),
    )


def sample_masked_nodes(
    candidates: np.ndarray, mask_fraction: float, seed: int
) -> np.ndarray:
    """
    Draw the sorted node ids that masked reconstruction zeroes out.

    ``max(1, round(mask_fraction * len(candidates)))`` ids are drawn from
    ``candidates`` without replacement.
    """
    candidates = np.asarray(candidates, dtype=np.int64)
    if candidates.size == 0:
        raise EmptyMaskError("Can't mask nodes of an empty graph")
    count = max(1, round_half_up(mask_fraction * candidates.size))
    return np.sort(make_rng(seed).choice(candidates, size=count, replace=False))


def loss_masked_reconstruction(
    spec: ModelSpec,
    params: ParamVector,
    batch: Batch,
    mask_fraction: float,
    seed: int,
    candidates: Optional[np.ndarray] = None,
) -> Tuple[float, ParamVector]:
    """
    Masked feature reconstruction loss and its parameter gradient.

    ``max(1, round(mask_fraction * n))`` uniformly drawn nodes get every
    input feature zeroed. With ``candidates`` given, the nodes are drawn from
    those ids only and ``n`` is their count. The ``recon`` head maps the
    embedding back to the concatenated input, and the loss is the mean squared
    error over the masked rows.

    Raises
    ------
    InvalidMaskFraction
        When ``mask_fraction`` is outside ``(0, 1)``.
    EmptyMaskError
        When the batch (or ``candidates``) has no node to mask.
    InvalidModelSpec
        When ``spec`` has no reconstruction head.
    """
    if not 0.0 < mask_fraction < 1.0:
        raise InvalidMaskFraction(
            f"mask_fraction has to be in (0, 1), got {mask_fraction}"
        )
    if not spec.reconstruction:
        raise InvalidModelSpec("Masked reconstruction needs a model with a recon head")
    if candidates is None:
        candidates = np.arange(batch.num_nodes)
    masked = sample_masked_nodes(candidates, mask_fraction, seed)

    dtype = params.dtype.type
    target = batch.stacked_input(dtype)[masked]
    features = {}
    for name, matrix in batch.features.items():
        matrix = matrix.copy()
        matrix[masked] = 0.0
        features[name] = matrix
    masked_batch = batch.with_features(features)

    result = forward(spec, params, masked_batch)
    weight = params.view("recon.weight")
    embedding = result.hidden[masked]
    residual = embedding @ weight + params.view("recon.bias") - target
    loss = float(np.mean(residual * residual))

    d_recon = 2.0 * residual / residual.size
    d_hidden = np.zeros_like(result.hidden)
    d_hidden[masked] = d_recon @ weight.T
    grads = backward(spec, params, masked_batch, result, d_hidden=d_hidden)
    grads.view("recon.weight")[...] += embedding.T @ d_recon
    grads.view("recon.bias")[...] += d_recon.sum(axis=0)
    return loss, grads


def sample_negative_edges(
    num_nodes: int, edges: np.ndarray, count: int, rng: np.random.Generator
) -> np.ndarray:
    """
    Sample up to ``count`` distinct uniform non-edges ``(u, v)`` with ``u < v``.

    Fewer pairs come back when the graph doesn't have ``count`` non-edges.
    """
    existing: Set[Tuple[int, int]] = {(int(u), int(v)) for u, v in edges}
    available = num_nodes * (num_nodes - 1) // 2 - len(existing)
    target = min(count, max(available, 0))
    chosen: Set[Tuple[int, int]] = set()
    pairs = []
    attempts = 0
    while len(pairs) < target and attempts < 100:
        attempts += 1
        draws = rng.integers(num_nodes, size=(2 * (target - len(pairs)) + 8, 2))
        for u, v in draws.tolist():
            if u == v:
                continue
            pair = (min(u, v), max(u, v))
            if pair in existing or pair in chosen:
                continue
            chosen.add(pair)
            pairs.append(pair)
            if len(pairs) == target:
                break
    if len(pairs) < count:
        log.debug("Sampled %s of %s requested negative edges", len(pairs), count)
    return np.array(pairs, dtype=np.int64).reshape(-1, 2)
