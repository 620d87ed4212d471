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

"""Base graphs of experiments, generated or loaded and kept in an LRU cache."""

import threading
from typing import Hashable, Sequence

import numpy as np
from cachetools import LRUCache, cached
from cachetools.keys import hashkey

from mmgraph import (
    ClientShard,
    Modality,
    MultimodalGraph,
    derive_seed,
    load_bundle,
    make_rng,
)
from mmsynth import (
    FeatureSynthParams,
    RdpgParams,
    SbmParams,
    class_latent_positions,
    synthesize_dataset,
)

from .config import DatasetConfig
from .errors import ConfigError
from .log import log

__all__ = ("load_base_graph", "build_base_graph", "select_modalities", "clear_cache")

_CACHE: LRUCache = LRUCache(maxsize=8)
_LOCK = threading.Lock()


def _cache_key(dataset: DatasetConfig, seed: int) -> Hashable:
    # a bundle is the same graph for every seed
    return hashkey(dataset, None if dataset.generator == "bundle" else seed)


def build_base_graph(dataset: DatasetConfig, seed: int) -> MultimodalGraph:
    """Generate (or load) the base graph of ``dataset`` without caching."""
    if dataset.generator == "bundle":
        assert dataset.bundle_path is not None, "mypy"
        return load_bundle(dataset.bundle_path)

    modalities = tuple(Modality(name, dim) for name, dim in dataset.modalities)
    informative = dataset.informative_modalities or tuple(
        m.name for m in modalities
    )
    features = FeatureSynthParams.class_separated(
        dataset.num_classes,
        modalities,
        informative_modalities=informative,
        separation=dataset.separation,
        sigma=dataset.sigma,
        seed=derive_seed(seed, "means"),
    )
    topology_seed = derive_seed(seed, "topology")
    if dataset.generator == "sbm":
        params = SbmParams(
            block_sizes=(dataset.nodes_per_class,) * dataset.num_classes,
            intra_p=dataset.intra_p,
            inter_p=dataset.inter_p,
            seed=topology_seed,
        )
        return synthesize_dataset(params, features, seed)
    if dataset.generator == "rdpg":
        labels = np.repeat(np.arange(dataset.num_classes), dataset.nodes_per_class)
        positions = class_latent_positions(
            labels,
            dataset.num_classes,
            dataset.rdpg_scale,
            dataset.rdpg_noise,
            make_rng(derive_seed(seed, "latent")),
        )
        padded = np.zeros((labels.size, dataset.latent_dim))
        padded[:, : positions.shape[1]] = positions
        rdpg = RdpgParams(dataset.latent_dim, padded, seed=topology_seed)
        return synthesize_dataset(rdpg, features, seed, labels=labels)
    raise ConfigError(f"Unknown dataset generator {dataset.generator!r}")


@cached(_CACHE, key=_cache_key, lock=_LOCK)
def load_base_graph(dataset: DatasetConfig, seed: int) -> MultimodalGraph:
    """
    Cached `build_base_graph()`.

    Graphs are immutable, so every caller can share the cached instance.
    """
    log.debug("Building base graph for seed %s", seed)
    return build_base_graph(dataset, seed)


def clear_cache() -> None:
    with _LOCK:
        _CACHE.clear()


def select_modalities(shard: ClientShard, names: Sequence[str]) -> ClientShard:
    """Restrict a shard's graph to ``names``, in that order."""
    graph = shard.graph
    if tuple(names) == graph.modality_names:
        return shard
    indices = [graph.modality_index(name) for name in names]
    assert graph.modality_mask is not None, "mypy"
    restricted = graph.with_features(
        {name: graph.features[name] for name in names},
        [graph.modalities[idx] for idx in indices],
        graph.modality_mask[:, indices],
    )
    return shard.with_graph(restricted)
