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

from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .errors import EmptyInputError, InvalidMetricArgument, LengthMismatch

__all__ = ("accuracy", "confusion_counts", "precision_recall_f1")

ArrayLike = Union[Sequence[int], np.ndarray]
Scores = Union[float, np.ndarray]


def _paired(preds: ArrayLike, labels: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    preds = np.asarray(preds).reshape(-1)
    labels = np.asarray(labels).reshape(-1)
    if preds.shape != labels.shape:
        raise LengthMismatch(
            f"Got {preds.shape[0]} predictions for {labels.shape[0]} labels"
        )
    if not preds.size:
        raise EmptyInputError("Metric needs at least one sample")
    return preds, labels


def accuracy(preds: ArrayLike, labels: ArrayLike) -> float:
    preds, labels = _paired(preds, labels)
    return float(np.mean(preds == labels))


def confusion_counts(
    preds: ArrayLike, labels: ArrayLike, classes: Optional[Sequence[int]] = None
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Per-class true positive, false positive and false negative counts.

    Returns ``(classes, tp, fp, fn)``. Classes default to every value seen
    in either input, sorted.
    """
    preds, labels = _paired(preds, labels)
    if classes is None:
        class_ids = np.union1d(preds, labels)
    else:
        class_ids = np.asarray(classes)
    hit = preds == labels
    tp = np.array([np.sum(hit & (labels == c)) for c in class_ids], dtype=np.int64)
    fp = np.array([np.sum(~hit & (preds == c)) for c in class_ids], dtype=np.int64)
    fn = np.array([np.sum(~hit & (labels == c)) for c in class_ids], dtype=np.int64)
    return class_ids, tp, fp, fn


def _ratio(numerator: np.ndarray, denominator: np.ndarray) -> np.ndarray:
    # a zero denominator scores 0 rather than NaN
    out = np.zeros(numerator.shape, dtype=np.float64)
    np.divide(numerator, denominator, out=out, where=denominator > 0)
    return out


def precision_recall_f1(
    preds: ArrayLike,
    labels: ArrayLike,
    averaging: Optional[str] = "macro",
    classes: Optional[Sequence[int]] = None,
) -> Tuple[Scores, Scores, Scores]:
    """
    Precision, recall and F1.

    Parameters
    ----------
    averaging: `str`, optional
        ``"macro"`` averages per-class scores, ``"micro"`` pools the counts
        of every class, None returns the per-class arrays.
    classes: `list` of `int`, optional
        Classes to score, defaults to every class seen in either input.

    A class without predicted (or actual) positives gets precision (or
    recall) 0, and F1 is 0 when precision and recall are both 0.
    """
    if averaging not in ("macro", "micro", None):
        raise InvalidMetricArgument(f"Unknown averaging {averaging!r}")
    _, tp, fp, fn = confusion_counts(preds, labels, classes)
    if averaging == "micro":
        tp, fp, fn = tp.sum(keepdims=True), fp.sum(keepdims=True), fn.sum(keepdims=True)
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    f1 = _ratio(2 * precision * recall, precision + recall)
    if averaging is None:
        return precision, recall, f1
    return float(precision.mean()), float(recall.mean()), float(f1.mean())
