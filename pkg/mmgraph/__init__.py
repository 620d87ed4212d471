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

"""In-memory multimodal-attributed graphs, client shards and graph bundles."""

from .bundle import load_bundle, save_bundle
from .errors import (
    BundleDimensionMismatch,
    BundleError,
    BundleFileMissing,
    BundleFormatError,
    BundleTruncated,
    GraphStructureError,
    InvalidNodeSelection,
    MMGraphException,
    UnknownModality,
)
from .graph import UNLABELED, Modality, MultimodalGraph, canonicalize, induce_subgraph
from .seeding import derive_seed, make_rng, round_half_up
from .shard import (
    DEFAULT_SPLIT,
    ClientShard,
    Provenance,
    SplitMasks,
    make_splits,
    validate_shard_cover,
)

__all__ = (
    "BundleDimensionMismatch",
    "BundleError",
    "BundleFileMissing",
    "BundleFormatError",
    "BundleTruncated",
    "ClientShard",
    "DEFAULT_SPLIT",
    "GraphStructureError",
    "InvalidNodeSelection",
    "MMGraphException",
    "Modality",
    "MultimodalGraph",
    "Provenance",
    "SplitMasks",
    "UNLABELED",
    "UnknownModality",
    "canonicalize",
    "derive_seed",
    "induce_subgraph",
    "load_bundle",
    "make_rng",
    "make_splits",
    "round_half_up",
    "save_bundle",
    "validate_shard_cover",
)
