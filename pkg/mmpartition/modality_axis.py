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

from typing import List, Sequence, Tuple

import numpy as np

from mmgraph import ClientShard, derive_seed, make_rng, round_half_up

from .errors import InvalidScenarioParams, ModalityCountError
from .label_axis import dirichlet_proportions
from .log import log

__all__ = ("apply_modality_noniid", "apply_missing_rate")


def apply_modality_noniid(
    shards: Sequence[ClientShard], beta: float, seed: int
) -> Tuple[ClientShard, ...]:
    """
    Mask modalities with client-specific Dirichlet availability.

    Client ``k`` draws ``rho_k ~ Dirichlet(beta * 1_M)`` and each of its
    nodes keeps modality ``m`` with probability ``min(1, M * rho_k[m])``.
    A node left without any modality gets back the modality it originally
    had that has the highest ``rho_k``.

    Raises
    ------
    ModalityCountError
        When the shards carry fewer than two modalities.
    InvalidScenarioParams
        When ``beta`` is not positive.
    """
    if beta <= 0:
        raise InvalidScenarioParams(f"beta has to be positive, got {beta}")
    if not shards:
        return ()
    num_modalities = shards[0].graph.num_modalities
    if num_modalities < 2:
        raise ModalityCountError(
            f"Modality-NonIID masking needs at least 2 modalities, got {num_modalities}"
        )
    result: List[ClientShard] = []
    repaired = 0
    for shard in shards:
        rng = make_rng(derive_seed(seed, "modality", shard.client_id))
        rho = dirichlet_proportions(beta, num_modalities, rng)
        keep_prob = np.minimum(1.0, num_modalities * rho)
        original = shard.graph.modality_mask
        assert original is not None, "mypy"
        keep = rng.random(original.shape) < keep_prob
        mask = original & keep
        empty = ~mask.any(axis=1) & original.any(axis=1)
        if empty.any():
            # highest rho among the modalities each node originally had
            preference = np.where(original[empty], rho, -1.0)
            mask[np.flatnonzero(empty), np.argmax(preference, axis=1)] = True
            repaired += int(empty.sum())
        result.append(shard.with_graph(shard.graph.with_modality_mask(mask)))
    log.debug("Modality-NonIID masking repaired %s featureless nodes", repaired)
    return tuple(result)


def apply_missing_rate(
    shards: Sequence[ClientShard], target_modality: str, rate: float, seed: int
) -> Tuple[ClientShard, ...]:
    """
    Mask ``target_modality`` on ``round(rate * n_k)`` nodes of every client.

    The masked nodes are a prefix of a per-client random permutation, so for
    a fixed seed the masked set only grows with ``rate``.

    Raises
    ------
    mmgraph.UnknownModality
        When a shard doesn't declare ``target_modality``.
    InvalidScenarioParams
        When ``rate`` is outside ``[0, 1]``.
    """
    if not 0.0 <= rate <= 1.0:
        raise InvalidScenarioParams(f"Missing rate has to be in [0, 1], got {rate}")
    for shard in shards:
        shard.graph.modality_index(target_modality)
    if rate == 0.0:
        return tuple(shards)
    result = []
    for shard in shards:
        graph = shard.graph
        idx = graph.modality_index(target_modality)
        order = make_rng(derive_seed(seed, "missing", shard.client_id)).permutation(
            graph.num_nodes
        )
        assert graph.modality_mask is not None, "mypy"
        mask = graph.modality_mask.copy()
        mask[order[: round_half_up(rate * graph.num_nodes)], idx] = False
        result.append(shard.with_graph(graph.with_modality_mask(mask)))
    return tuple(result)
