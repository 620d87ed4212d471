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

from typing import Any, List, Sequence, Tuple, Union

import numpy as np
from scipy.stats import rankdata

from .errors import (
    EmptyInputError,
    InvalidMetricArgument,
    LengthMismatch,
    NoPositivesError,
    SingleClassError,
)

__all__ = (
    "average_precision",
    "auc_roc",
    "rank_of",
    "recall_at_k",
    "mrr",
    "rank_by_similarity",
)

ArrayLike = Union[Sequence[float], np.ndarray]


def _scored(scores: ArrayLike, labels: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    labels = np.asarray(labels).reshape(-1).astype(bool)
    if scores.shape != labels.shape:
        raise LengthMismatch(
            f"Got {scores.shape[0]} scores for {labels.shape[0]} labels"
        )
    if not scores.size:
        raise EmptyInputError("Ranking metric needs at least one sample")
    return scores, labels


def average_precision(scores: ArrayLike, labels: ArrayLike) -> float:
    """
    Area under the step-wise precision-recall curve.

    Thresholds are the distinct score values in descending order, so tied
    samples enter the ranking together.

    Raises
    ------
    NoPositivesError
        When no label is positive.
    """
    scores, labels = _scored(scores, labels)
    positives = int(labels.sum())
    if not positives:
        raise NoPositivesError("Average precision needs at least one positive")
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    true_hits = np.cumsum(labels[order])
    # last position of every group of tied scores
    group_end = np.flatnonzero(np.diff(sorted_scores, append=-np.inf) != 0)
    tp = true_hits[group_end]
    precision = tp / (group_end + 1)
    recall = tp / positives
    previous = np.concatenate([[0.0], recall[:-1]])
    return float(np.sum((recall - previous) * precision))


def auc_roc(scores: ArrayLike, labels: ArrayLike) -> float:
    """
    Probability that a random positive outscores a random negative,
    counting ties as one half.

    Raises
    ------
    SingleClassError
        When the labels hold only positives or only negatives.
    """
    scores, labels = _scored(scores, labels)
    positives = int(labels.sum())
    negatives = labels.size - positives
    if not positives or not negatives:
        raise SingleClassError("AUC-ROC needs positive and negative samples")
    ranks = rankdata(scores)
    rank_sum = float(ranks[labels].sum())
    concordant = rank_sum - positives * (positives + 1) / 2.0
    return concordant / (positives * negatives)


def rank_of(ranked: Sequence[Any], truth: Any) -> int:
    """1-indexed rank of ``truth`` in ``ranked``, 0 when absent."""
    for position, item in enumerate(ranked, 1):
        if item == truth:
            return position
    return 0


def _ranks(ranked_lists: Sequence[Sequence[Any]], truths: Sequence[Any]) -> np.ndarray:
    if len(ranked_lists) != len(truths):
        raise LengthMismatch(
            f"Got {len(ranked_lists)} ranked lists for {len(truths)} truths"
        )
    if not len(truths):
        raise EmptyInputError("Retrieval metric needs at least one query")
    return np.array(
        [rank_of(ranked, truth) for ranked, truth in zip(ranked_lists, truths)],
        dtype=np.int64,
    )


def recall_at_k(
    ranked_lists: Sequence[Sequence[Any]], truths: Sequence[Any], k: int
) -> float:
    """Fraction of queries whose truth is ranked within the top ``k``."""
    if k < 1:
        raise InvalidMetricArgument(f"k has to be at least 1, got {k}")
    ranks = _ranks(ranked_lists, truths)
    return float(np.mean((ranks >= 1) & (ranks <= k)))


def mrr(ranked_lists: Sequence[Sequence[Any]], truths: Sequence[Any]) -> float:
    """Mean reciprocal rank; a query whose truth is absent contributes 0."""
    ranks = _ranks(ranked_lists, truths)
    reciprocal = np.zeros(ranks.shape, dtype=np.float64)
    np.divide(1.0, ranks, out=reciprocal, where=ranks > 0)
    return float(reciprocal.mean())


def rank_by_similarity(queries: np.ndarray, candidates: np.ndarray) -> List[List[int]]:
    """
    Rank candidate rows by cosine similarity to every query row.

    Equal similarities keep candidate order.
    """
    q = queries / np.maximum(np.linalg.norm(queries, axis=1, keepdims=True), 1e-12)
    c = candidates / np.maximum(
        np.linalg.norm(candidates, axis=1, keepdims=True), 1e-12
    )
    similarity = q @ c.T
    return np.argsort(-similarity, axis=1, kind="stable").tolist()
