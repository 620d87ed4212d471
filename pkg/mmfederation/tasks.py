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
Learning tasks a federation can train and evaluate.

A task knows how to prepare a client's data, compute its loss with the
parameter gradient, and score predictions. Scoring takes the collected
samples of any number of clients, so one call can evaluate the union of
every client's test nodes.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from mmgraph import ClientShard, SplitMasks, derive_seed, make_rng, round_half_up
from mmmetrics import (
    accuracy,
    auc_roc,
    average_precision,
    mrr,
    precision_recall_f1,
    rank_by_similarity,
    recall_at_k,
)
from mmnn import (
    DEFAULT_TEMPERATURE,
    Architecture,
    Batch,
    ModelSpec,
    ParamVector,
    backward,
    forward,
    loss_contrastive,
    loss_link_prediction,
    loss_masked_reconstruction,
    loss_node_classification,
    make_batch,
    sample_negative_edges,
)

from .errors import TaskMismatch

__all__ = (
    "EdgeSplit",
    "ClientData",
    "HiddenHook",
    "Task",
    "NodeClassification",
    "LinkPrediction",
    "ModalityContrastive",
    "MaskedReconstruction",
    "SelfSupervised",
    "split_edges",
)

#: ``(hidden, data) -> (loss, d_hidden)`` term added to a task loss.
HiddenHook = Callable[[np.ndarray, "ClientData"], Tuple[float, np.ndarray]]

_SPLITS = ("train", "val", "test")


@dataclass(frozen=True, eq=False)
class EdgeSplit:
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray

    def get(self, split: str) -> np.ndarray:
        return getattr(self, split)


def split_edges(
    edges: np.ndarray, seed: int, fractions: Tuple[float, float] = (0.8, 0.1)
) -> EdgeSplit:
    """Shuffle edges into train/val/test; test takes what train and val leave."""
    order = make_rng(seed).permutation(edges.shape[0])
    n_train = round_half_up(fractions[0] * edges.shape[0])
    n_val = min(edges.shape[0] - n_train, round_half_up(fractions[1] * edges.shape[0]))
    chunks = np.split(order, [n_train, n_train + n_val])
    return EdgeSplit(*(edges[np.sort(chunk)] for chunk in chunks))


def _node_split(num_nodes: int, seed: int) -> SplitMasks:
    order = make_rng(seed).permutation(num_nodes)
    n_train = round_half_up(0.8 * num_nodes)
    n_val = min(num_nodes - n_train, round_half_up(0.1 * num_nodes))
    masks = [np.zeros(num_nodes, dtype=bool) for _ in _SPLITS]
    masks[0][order[:n_train]] = True
    masks[1][order[n_train : n_train + n_val]] = True
    masks[2][order[n_train + n_val :]] = True
    return SplitMasks(*masks)


@dataclass(frozen=True, eq=False)
class ClientData:
    """
    Everything a client trains and evaluates on.

    Attributes
    ----------
    shard: `ClientShard`
        The client's shard.
    batch: `Batch`
        Model input. Its adjacency only holds training edges for link tasks.
    edge_split: `EdgeSplit`
        Train/val/test split of the shard's edges.
    node_split: `SplitMasks`
        Split of every node (labeled or not) for self-supervised tasks.
    """

    shard: ClientShard
    batch: Batch
    edge_split: EdgeSplit
    node_split: SplitMasks

    @property
    def num_nodes(self) -> int:
        return self.shard.num_nodes

    def label_mask(self, split: str) -> np.ndarray:
        return getattr(self.shard.splits, split)

    def node_mask(self, split: str) -> np.ndarray:
        return getattr(self.node_split, split)


class Task(abc.ABC):
    """Base class of federated learning tasks."""

    name: str = "task"
    primary_metric: str = ""
    higher_is_better: bool = True
    default_lr: float = 1e-3

    def validate(self, spec: ModelSpec) -> None:
        """Raise `TaskMismatch` when ``spec`` can't serve this task."""

    def prepare(self, shard: ClientShard, seed: int) -> ClientData:
        graph = shard.graph
        return ClientData(
            shard=shard,
            batch=make_batch(graph),
            edge_split=split_edges(graph.edges, derive_seed(seed, "edges")),
            node_split=_node_split(graph.num_nodes, derive_seed(seed, "nodes")),
        )

    def num_samples(self, data: ClientData) -> int:
        """Aggregation weight of a client."""
        return data.num_nodes

    @abc.abstractmethod
    def loss(
        self,
        spec: ModelSpec,
        params: ParamVector,
        data: ClientData,
        seed: int,
        hidden_hook: Optional[HiddenHook] = None,
    ) -> Tuple[float, ParamVector]:
        raise NotImplementedError

    @abc.abstractmethod
    def collect(
        self,
        spec: ModelSpec,
        params: ParamVector,
        data: ClientData,
        split: str,
        seed: int,
    ) -> Any:
        """Predictions and targets of one client on ``split``."""
        raise NotImplementedError

    @abc.abstractmethod
    def score(self, collected: Sequence[Any]) -> Dict[str, float]:
        """Metrics over the union of the collected samples; {} when undefined."""
        raise NotImplementedError

    def evaluate(
        self,
        spec: ModelSpec,
        params: ParamVector,
        data: ClientData,
        split: str,
        seed: int,
    ) -> Dict[str, float]:
        return self.score([self.collect(spec, params, data, split, seed)])


class NodeClassification(Task):
    name = "node_classification"
    primary_metric = "accuracy"
    default_lr = 5e-3

    def validate(self, spec: ModelSpec) -> None:
        if spec.output_dim < 2:
            raise TaskMismatch("Node classification needs output_dim >= 2")

    def num_samples(self, data: ClientData) -> int:
        return data.shard.num_samples

    def loss(
        self,
        spec: ModelSpec,
        params: ParamVector,
        data: ClientData,
        seed: int,
        hidden_hook: Optional[HiddenHook] = None,
    ) -> Tuple[float, ParamVector]:
        mask = data.label_mask("train")
        labels = data.batch.labels
        if labels is None or not mask.any():
            return 0.0, params.zeros_like()
        result = forward(spec, params, data.batch)
        loss, d_output = loss_node_classification(result.output, labels, mask)
        d_hidden = None
        if hidden_hook is not None:
            extra, d_hidden = hidden_hook(result.hidden, data)
            loss += extra
        grads = backward(spec, params, data.batch, result, d_output, d_hidden)
        return loss, grads

    def collect(
        self,
        spec: ModelSpec,
        params: ParamVector,
        data: ClientData,
        split: str,
        seed: int,
    ) -> Tuple[np.ndarray, np.ndarray]:
        mask = data.label_mask(split)
        labels = data.batch.labels
        if labels is None or not mask.any():
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
        logits = forward(spec, params, data.batch).output
        return np.argmax(logits[mask], axis=1), labels[mask]

    def score(
        self, collected: Sequence[Tuple[np.ndarray, np.ndarray]]
    ) -> Dict[str, float]:
        preds = np.concatenate([c[0] for c in collected])
        labels = np.concatenate([c[1] for c in collected])
        if not preds.size:
            return {}
        precision, recall, f1 = precision_recall_f1(preds, labels)
        return {
            "accuracy": accuracy(preds, labels),
            "precision": float(precision),
            "recall": float(recall),
            "f1": float(f1),
        }


class LinkPrediction(Task):
    """
    Dot-product link prediction.

    Message passing only sees training edges. Every loss call samples as
    many fresh negatives as there are positives. With ``on_hidden`` the
    scores come from the backbone embedding instead of the head output,
    which leaves the head untouched for later fine-tuning.
    """

    name = "link_prediction"
    primary_metric = "auc"
    default_lr = 1e-3

    def __init__(self, on_hidden: bool = False) -> None:
        self.on_hidden = on_hidden

    def prepare(self, shard: ClientShard, seed: int) -> ClientData:
        data = super().prepare(shard, seed)
        train_graph = shard.graph.with_edges(data.edge_split.train)
        return ClientData(
            shard=shard,
            batch=make_batch(train_graph),
            edge_split=data.edge_split,
            node_split=data.node_split,
        )

    def num_samples(self, data: ClientData) -> int:
        return int(data.edge_split.train.shape[0])

    def _embeddings(self, spec: ModelSpec, params: ParamVector, batch: Batch) -> Any:
        result = forward(spec, params, batch)
        return result, result.hidden if self.on_hidden else result.output

    def loss(
        self,
        spec: ModelSpec,
        params: ParamVector,
        data: ClientData,
        seed: int,
        hidden_hook: Optional[HiddenHook] = None,
    ) -> Tuple[float, ParamVector]:
        positives = data.edge_split.train
        if not positives.shape[0]:
            return 0.0, params.zeros_like()
        negatives = sample_negative_edges(
            data.num_nodes, data.shard.graph.edges, positives.shape[0], make_rng(seed)
        )
        result, embeddings = self._embeddings(spec, params, data.batch)
        loss, d_embeddings = loss_link_prediction(embeddings, positives, negatives)
        if self.on_hidden:
            grads = backward(spec, params, data.batch, result, d_hidden=d_embeddings)
        else:
            grads = backward(spec, params, data.batch, result, d_output=d_embeddings)
        return loss, grads

    def collect(
        self,
        spec: ModelSpec,
        params: ParamVector,
        data: ClientData,
        split: str,
        seed: int,
    ) -> Tuple[np.ndarray, np.ndarray]:
        positives = data.edge_split.get(split)
        negatives = sample_negative_edges(
            data.num_nodes, data.shard.graph.edges, positives.shape[0], make_rng(seed)
        )
        _, embeddings = self._embeddings(spec, params, data.batch)
        pairs = np.concatenate([positives, negatives])
        products = embeddings[pairs[:, 0]] * embeddings[pairs[:, 1]]
        scores = expit(np.sum(products, axis=1))
        labels = np.concatenate(
            [np.ones(positives.shape[0]), np.zeros(negatives.shape[0])]
        )
        return scores, labels

    def score(
        self, collected: Sequence[Tuple[np.ndarray, np.ndarray]]
    ) -> Dict[str, float]:
        scores = np.concatenate([c[0] for c in collected])
        labels = np.concatenate([c[1] for c in collected]).astype(bool)
        if not labels.any() or labels.all():
            return {}
        return {"auc": auc_roc(scores, labels), "ap": average_precision(scores, labels)}


class ModalityContrastive(Task):
    """
    Cross-modal alignment of two MMGCN branches.

    Trains with symmetric InfoNCE on nodes that hold both modalities.
    ``mode="matching"`` scores aligned pairs against shuffled pairs with
    AUC-ROC and AP, ``mode="retrieval"`` ranks every candidate of the second
    modality per query and reports Recall@K and MRR.
    """

    default_lr = 1e-3

    def __init__(
        self,
        modality_a: str,
        modality_b: str,
        temperature: float = DEFAULT_TEMPERATURE,
        mode: str = "matching",
        k: int = 10,
    ) -> None:
        if mode not in ("matching", "retrieval"):
            raise TaskMismatch(f"Unknown contrastive evaluation mode {mode!r}")
        self.modality_a = modality_a
        self.modality_b = modality_b
        self.temperature = temperature
        self.mode = mode
        self.k = k
        self.name = f"modality_{mode}"
        self.primary_metric = "auc" if mode == "matching" else "mrr"

    def validate(self, spec: ModelSpec) -> None:
        if spec.architecture is not Architecture.MMGCN:
            raise TaskMismatch("Cross-modal tasks need the MMGCN architecture")
        names = [m.name for m in spec.modalities]
        for name in (self.modality_a, self.modality_b):
            if name not in names:
                raise TaskMismatch(f"Model has no {name!r} branch")
        if self.modality_a == self.modality_b:
            raise TaskMismatch("Cross-modal tasks need two different modalities")

    def _rows(self, data: ClientData, mask: np.ndarray) -> np.ndarray:
        present = data.batch.modality_mask
        idx_a = data.shard.graph.modality_index(self.modality_a)
        idx_b = data.shard.graph.modality_index(self.modality_b)
        return np.flatnonzero(mask & present[:, idx_a] & present[:, idx_b])

    def loss(
        self,
        spec: ModelSpec,
        params: ParamVector,
        data: ClientData,
        seed: int,
        hidden_hook: Optional[HiddenHook] = None,
    ) -> Tuple[float, ParamVector]:
        rows = self._rows(data, data.node_mask("train"))
        if rows.size < 2:
            return 0.0, params.zeros_like()
        result = forward(spec, params, data.batch)
        z_a = result.branches[self.modality_a]
        z_b = result.branches[self.modality_b]
        loss, d_a, d_b = loss_contrastive(z_a[rows], z_b[rows], self.temperature)
        d_branches = {
            self.modality_a: np.zeros_like(z_a),
            self.modality_b: np.zeros_like(z_b),
        }
        d_branches[self.modality_a][rows] = d_a
        d_branches[self.modality_b][rows] = d_b
        return loss, backward(spec, params, data.batch, result, d_branches=d_branches)

    def collect(
        self,
        spec: ModelSpec,
        params: ParamVector,
        data: ClientData,
        split: str,
        seed: int,
    ) -> Tuple[np.ndarray, np.ndarray]:
        rows = self._rows(data, data.node_mask(split))
        result = forward(spec, params, data.batch)
        return (
            result.branches[self.modality_a][rows],
            result.branches[self.modality_b][rows],
        )

    def score(
        self, collected: Sequence[Tuple[np.ndarray, np.ndarray]]
    ) -> Dict[str, float]:
        z_a = np.concatenate([c[0] for c in collected])
        z_b = np.concatenate([c[1] for c in collected])
        n = z_a.shape[0]
        if n < 2:
            return {}
        if self.mode == "retrieval":
            ranked = rank_by_similarity(z_a, z_b)
            truths = list(range(n))
            return {
                f"recall@{self.k}": recall_at_k(ranked, truths, self.k),
                "mrr": mrr(ranked, truths),
            }
        unit_a = z_a / np.maximum(np.linalg.norm(z_a, axis=1, keepdims=True), 1e-12)
        unit_b = z_b / np.maximum(np.linalg.norm(z_b, axis=1, keepdims=True), 1e-12)
        # a random cyclic pairing never pairs a row with itself
        order = make_rng(0).permutation(n)
        partner = np.empty(n, dtype=np.int64)
        partner[order] = np.roll(order, -1)
        positives = np.sum(unit_a * unit_b, axis=1)
        negatives = np.sum(unit_a * unit_b[partner], axis=1)
        scores = np.concatenate([positives, negatives])
        labels = np.concatenate([np.ones(n, dtype=bool), np.zeros(n, dtype=bool)])
        return {"auc": auc_roc(scores, labels), "ap": average_precision(scores, labels)}


class MaskedReconstruction(Task):
    name = "masked_reconstruction"
    primary_metric = "recon_mse"
    higher_is_better = False

    def __init__(self, mask_fraction: float = 0.2) -> None:
        self.mask_fraction = mask_fraction

    def validate(self, spec: ModelSpec) -> None:
        if not spec.reconstruction:
            raise TaskMismatch("Masked reconstruction needs a model with a recon head")

    def num_samples(self, data: ClientData) -> int:
        return int(data.node_mask("train").sum())

    def loss(
        self,
        spec: ModelSpec,
        params: ParamVector,
        data: ClientData,
        seed: int,
        hidden_hook: Optional[HiddenHook] = None,
    ) -> Tuple[float, ParamVector]:
        candidates = np.flatnonzero(data.node_mask("train"))
        if not candidates.size:
            return 0.0, params.zeros_like()
        return loss_masked_reconstruction(
            spec, params, data.batch, self.mask_fraction, seed, candidates
        )

    def collect(
        self,
        spec: ModelSpec,
        params: ParamVector,
        data: ClientData,
        split: str,
        seed: int,
    ) -> Tuple[float, int]:
        candidates = np.flatnonzero(data.node_mask(split))
        if not candidates.size:
            return 0.0, 0
        loss, _ = loss_masked_reconstruction(
            spec, params, data.batch, self.mask_fraction, seed, candidates
        )
        return loss, int(candidates.size)

    def score(self, collected: Sequence[Tuple[float, int]]) -> Dict[str, float]:
        total = sum(count for _, count in collected)
        if not total:
            return {}
        return {"recon_mse": sum(loss * count for loss, count in collected) / total}


class SelfSupervised(Task):
    """Weighted sum of self-supervised objectives."""

    name = "self_supervised"

    def __init__(self, components: Sequence[Tuple[Task, float]]) -> None:
        if not components:
            raise TaskMismatch("A self-supervised objective needs at least one part")
        self.components = list(components)
        first = self.components[0][0]
        self.primary_metric = f"{first.name}.{first.primary_metric}"
        self.higher_is_better = first.higher_is_better
        self.default_lr = first.default_lr

    def validate(self, spec: ModelSpec) -> None:
        for task, _ in self.components:
            task.validate(spec)

    def prepare(self, shard: ClientShard, seed: int) -> ClientData:
        for task, _ in self.components:
            if isinstance(task, LinkPrediction):
                return task.prepare(shard, seed)
        return super().prepare(shard, seed)

    def loss(
        self,
        spec: ModelSpec,
        params: ParamVector,
        data: ClientData,
        seed: int,
        hidden_hook: Optional[HiddenHook] = None,
    ) -> Tuple[float, ParamVector]:
        total = 0.0
        grads = params.zeros_like()
        for idx, (task, weight) in enumerate(self.components):
            loss, part = task.loss(spec, params, data, derive_seed(seed, idx))
            total += weight * loss
            grads.values += weight * part.values
        return total, grads

    def collect(
        self,
        spec: ModelSpec,
        params: ParamVector,
        data: ClientData,
        split: str,
        seed: int,
    ) -> List[Any]:
        return [
            task.collect(spec, params, data, split, seed) for task, _ in self.components
        ]

    def score(self, collected: Sequence[List[Any]]) -> Dict[str, float]:
        metrics: Dict[str, float] = {}
        for idx, (task, _) in enumerate(self.components):
            for key, value in task.score([c[idx] for c in collected]).items():
                metrics[f"{task.name}.{key}"] = value
        return metrics
