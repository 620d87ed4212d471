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

"""Evaluation and data-analysis metrics."""

from .classification import accuracy, confusion_counts, precision_recall_f1
from .distribution import (
    FeatureDivergence,
    FeatureHistogramSet,
    feature_histograms,
    feature_kl,
)
from .errors import (
    EmptyCorpusError,
    EmptyInputError,
    InvalidMetricArgument,
    LengthMismatch,
    MetricsException,
    MissingLabelsError,
    NoEdgesError,
    NoPositivesError,
    SingleClassError,
)
from .graph_stats import (
    TopologyDisparity,
    TopologyStats,
    client_topology_disparity,
    edge_homophily,
    topology_stats,
)
from .ranking import (
    auc_roc,
    average_precision,
    mrr,
    rank_by_similarity,
    rank_of,
    recall_at_k,
)
from .report import CONVERGENCE_THRESHOLD, MetricReport, convergence_round
from .text import CIDER_SCALE, bleu, cider, lcs_length, ngrams, rouge_l, tokenize

__all__ = (
    "CIDER_SCALE",
    "CONVERGENCE_THRESHOLD",
    "EmptyCorpusError",
    "EmptyInputError",
    "FeatureDivergence",
    "FeatureHistogramSet",
    "InvalidMetricArgument",
    "LengthMismatch",
    "MetricReport",
    "MetricsException",
    "MissingLabelsError",
    "NoEdgesError",
    "NoPositivesError",
    "SingleClassError",
    "TopologyDisparity",
    "TopologyStats",
    "accuracy",
    "auc_roc",
    "average_precision",
    "bleu",
    "cider",
    "client_topology_disparity",
    "confusion_counts",
    "convergence_round",
    "edge_homophily",
    "feature_histograms",
    "feature_kl",
    "lcs_length",
    "mrr",
    "ngrams",
    "precision_recall_f1",
    "rank_by_similarity",
    "rank_of",
    "recall_at_k",
    "rouge_l",
    "tokenize",
    "topology_stats",
)
