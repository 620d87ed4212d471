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
Data analysis of client shards.

Feature divergence, label homophily and topology statistics of one set of
shards, collected into a `MetricReport` and persisted next to the results.
"""

from typing import Sequence

from mmgraph import ClientShard
from mmmetrics import (
    MetricReport,
    MissingLabelsError,
    NoEdgesError,
    client_topology_disparity,
    edge_homophily,
    feature_kl,
    topology_stats,
)

from .log import log

__all__ = ("ANALYSIS_FILE", "KL_BINS", "analyze_shards")

ANALYSIS_FILE = "analysis.jsonl"
#: Histogram bins of the feature divergence.
KL_BINS = 32


def analyze_shards(shards: Sequence[ClientShard], bins: int = KL_BINS) -> MetricReport:
    """
    Data-analysis report of one scenario's client shards.

    Per-client values are flattened to ``<metric>.<client>`` keys and the
    pairwise divergence to ``feature_kl_pairwise.<i>.<j>``. Homophily is
    left out for clients without a labeled edge.
    """
    report = MetricReport()
    divergence = feature_kl(shards, bins=bins)
    report.metadata["kl_direction"] = divergence.direction
    report.metadata["kl_bins"] = str(bins)
    report.add("feature_kl_mean", divergence.mean)
    report.add_per_class("feature_kl", divergence.per_client)
    for idx, row in enumerate(divergence.pairwise):
        report.add_per_class(f"feature_kl_pairwise.{idx}", row)

    homophily = []
    for shard in shards:
        try:
            value = edge_homophily(shard.graph)
        except (MissingLabelsError, NoEdgesError):
            log.debug("No edge homophily for client %s", shard.client_id)
            continue
        report.add(f"edge_homophily.{shard.client_id}", value)
        homophily.append(value)
    if homophily:
        report.add("edge_homophily_mean", sum(homophily) / len(homophily))

    stats = [topology_stats(shard.graph).to_dict() for shard in shards]
    for name in ("degree_mean", "degree_var", "degree_max", "density"):
        report.add_per_class(name, [s[name] for s in stats])
    report.update(
        {
            f"disparity.{name}": value
            for name, value in client_topology_disparity(shards).to_dict().items()
        }
    )
    return report
