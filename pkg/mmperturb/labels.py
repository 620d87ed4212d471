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

import numpy as np

from mmgraph import ClientShard, MultimodalGraph, SplitMasks, make_rng, round_half_up

from .errors import SingleClassError
from .log import log
from .topology import check_ratio

__all__ = ("label_noise", "label_sparsify")


def label_noise(graph: MultimodalGraph, ratio: float, seed: int) -> MultimodalGraph:
    """
    Give ``round(ratio * L)`` labeled nodes a uniformly drawn different label.

    Raises
    ------
    SingleClassError
        When the graph has fewer than two classes.
    """
    check_ratio("label_noise", ratio)
    labeled = graph.labeled_nodes()
    count = round_half_up(ratio * labeled.size)
    if count == 0:
        return graph
    num_classes = graph.num_classes
    if num_classes < 2:
        raise SingleClassError("Label noise needs at least two classes")
    assert graph.labels is not None, "mypy"
    rng = make_rng(seed)
    chosen = rng.choice(labeled, size=count, replace=False)
    labels = graph.labels.copy()
    offsets = rng.integers(1, num_classes, size=count)
    labels[chosen] = (labels[chosen] + offsets) % num_classes
    return graph.with_labels(labels, num_classes)


def label_sparsify(shard: ClientShard, ratio: float, seed: int) -> ClientShard:
    """
    Drop ``round(ratio * |train|)`` nodes from the train mask.

    Validation and test masks are left untouched. A non-empty train mask
    always keeps at least one node.
    """
    check_ratio("label_sparsify", ratio)
    train = np.flatnonzero(shard.splits.train)
    count = round_half_up(ratio * train.size)
    if count == 0:
        return shard
    if count >= train.size:
        log.warning(
            "Client %s would lose its whole train mask, keeping one node",
            shard.client_id,
        )
        count = train.size - 1
    dropped = make_rng(seed).choice(train, size=count, replace=False)
    mask = shard.splits.train.copy()
    mask[dropped] = False
    return shard.with_splits(SplitMasks(mask, shard.splits.val, shard.splits.test))
