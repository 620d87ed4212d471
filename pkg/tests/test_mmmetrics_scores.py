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

import itertools
from typing import List

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sklearn.metrics import (
    average_precision_score,
    precision_recall_fscore_support,
    roc_auc_score,
)

from mmgraph import make_rng
from mmmetrics import (
    EmptyInputError,
    InvalidMetricArgument,
    LengthMismatch,
    MetricReport,
    NoPositivesError,
    SingleClassError,
    accuracy,
    auc_roc,
    average_precision,
    confusion_counts,
    convergence_round,
    mrr,
    precision_recall_f1,
    rank_by_similarity,
    rank_of,
    recall_at_k,
)


def brute_force_auc(scores: List[int], labels: List[bool]) -> float:
    positives = [s for s, y in zip(scores, labels) if y]
    negatives = [s for s, y in zip(scores, labels) if not y]
    wins = sum(
        1.0 if p > n else 0.5 if p == n else 0.0
        for p, n in itertools.product(positives, negatives)
    )
    return wins / (len(positives) * len(negatives))


@given(
    st.lists(
        st.tuples(st.integers(0, 5), st.booleans()), min_size=2, max_size=30
    ).filter(lambda rows: 0 < sum(y for _, y in rows) < len(rows))
)
def test_auc_matches_pairwise_count(rows: List[tuple]) -> None:
    scores = [s for s, _ in rows]
    labels = [y for _, y in rows]
    assert auc_roc(scores, labels) == pytest.approx(brute_force_auc(scores, labels))


@pytest.mark.parametrize("seed", range(5))
def test_ranking_metrics_match_sklearn(seed: int) -> None:
    rng = make_rng(seed)
    scores = rng.integers(0, 8, size=50) / 8.0
    labels = rng.random(50) < 0.4
    assert auc_roc(scores, labels) == pytest.approx(roc_auc_score(labels, scores))
    assert average_precision(scores, labels) == pytest.approx(
        average_precision_score(labels, scores)
    )


def test_perfect_and_reversed_rankings() -> None:
    labels = [1, 1, 0, 0]
    assert auc_roc([4, 3, 2, 1], labels) == 1.0
    assert auc_roc([1, 2, 3, 4], labels) == 0.0
    assert auc_roc([1, 1, 1, 1], labels) == 0.5
    assert average_precision([4, 3, 2, 1], labels) == 1.0
    # hits at ranks 2 and 4
    assert average_precision([3, 1, 4, 2], labels) == pytest.approx(
        0.5 * (1 / 2 + 2 / 4)
    )


def test_ranking_metric_errors() -> None:
    with pytest.raises(SingleClassError):
        auc_roc([0.1, 0.2], [1, 1])
    with pytest.raises(NoPositivesError):
        average_precision([0.1, 0.2], [0, 0])
    with pytest.raises(LengthMismatch):
        auc_roc([0.1, 0.2, 0.3], [0, 1])
    with pytest.raises(EmptyInputError):
        average_precision([], [])


def test_accuracy_and_confusion_counts() -> None:
    preds = [0, 1, 1, 2, 2, 2]
    labels = [0, 1, 2, 2, 1, 0]
    assert accuracy(preds, labels) == pytest.approx(0.5)
    classes, tp, fp, fn = confusion_counts(preds, labels)
    assert classes.tolist() == [0, 1, 2]
    assert tp.tolist() == [1, 1, 1]
    assert fp.tolist() == [0, 1, 2]
    assert fn.tolist() == [1, 1, 1]
    with pytest.raises(EmptyInputError):
        accuracy([], [])


@pytest.mark.parametrize("averaging", ["macro", "micro"])
@pytest.mark.parametrize("seed", range(5))
def test_precision_recall_f1_match_sklearn(averaging: str, seed: int) -> None:
    rng = make_rng(seed)
    labels = rng.integers(0, 4, size=40)
    preds = np.where(rng.random(40) < 0.5, labels, rng.integers(0, 5, size=40))
    expected = precision_recall_fscore_support(
        labels, preds, average=averaging, zero_division=0
    )[:3]
    assert precision_recall_f1(preds, labels, averaging) == pytest.approx(expected)


def test_class_without_predictions_scores_zero() -> None:
    precision, recall, f1 = precision_recall_f1([0, 0], [0, 1], averaging=None)
    assert precision.tolist() == [0.5, 0.0]
    assert recall.tolist() == [1.0, 0.0]
    assert f1[1] == 0.0
    with pytest.raises(InvalidMetricArgument):
        precision_recall_f1([0], [0], averaging="weighted")


def test_retrieval_metrics() -> None:
    ranked = [["a", "b", "c"], ["c", "a", "b"], ["b", "c", "d"]]
    truths = ["a", "a", "a"]
    assert rank_of(ranked[1], "a") == 2
    assert rank_of(ranked[2], "a") == 0
    assert recall_at_k(ranked, truths, 1) == pytest.approx(1 / 3)
    assert recall_at_k(ranked, truths, 2) == pytest.approx(2 / 3)
    assert mrr(ranked, truths) == pytest.approx((1 + 0.5 + 0) / 3)
    with pytest.raises(InvalidMetricArgument):
        recall_at_k(ranked, truths, 0)
    with pytest.raises(LengthMismatch):
        mrr(ranked, truths[:2])


def test_rank_by_similarity_uses_cosine() -> None:
    queries = np.array([[1.0, 0.0], [0.0, 2.0]])
    candidates = np.array([[0.0, 1.0], [10.0, 1.0], [1.0, 0.0]])
    ranked = rank_by_similarity(queries, candidates)
    assert ranked[0] == [2, 1, 0]
    assert ranked[1] == [0, 1, 2]


def test_convergence_round() -> None:
    assert convergence_round([0.5, 0.9, 0.95, 0.949]) == 3
    assert convergence_round([1.0, 0.2]) == 1
    assert convergence_round([0.1, 0.2, 0.3], threshold=0.5) == 2
    with pytest.raises(EmptyInputError):
        convergence_round([])


def test_metric_report_serializes_sorted() -> None:
    report = MetricReport(metadata={"task": "node"})
    report.update({"loss": 0.25, "accuracy": 0.5})
    report.add_per_class("f1", [0.1, 0.9])
    assert "accuracy" in report
    assert report["loss"] == 0.25
    assert report.to_json() == (
        '{"accuracy": 0.5, "f1.0": 0.1, "f1.1": 0.9, "loss": 0.25,'
        ' "meta.task": "node"}'
    )
    with pytest.raises(InvalidMetricArgument):
        report.add("auc", float("nan"))
