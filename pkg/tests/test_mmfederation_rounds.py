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
from concurrent.futures import ThreadPoolExecutor
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np
import pytest
from conftest import IMAGE, TEXT

from mmfederation import (
    AggregatorConfig,
    AggregatorKind,
    ClientData,
    ClientState,
    FederationConfig,
    HiddenHook,
    LinkPrediction,
    MaskedReconstruction,
    ModalityContrastive,
    NodeClassification,
    SelfSupervised,
    ServerState,
    Task,
    TaskMismatch,
    evaluate,
    fedprox_hook,
    init_clients,
    init_server,
    local_train_early_stopping,
    macro_average,
    param_payload_size,
    prototype_payload_size,
    run_federated,
    run_isolated,
    run_round,
    run_two_stage,
    sample_clients,
    split_edges,
)
from mmgraph import ClientShard, MultimodalGraph, make_rng
from mmnn import (
    Architecture,
    ModelSpec,
    OptimizerConfig,
    OptimizerKind,
    ParamVector,
    grad_check,
    init_params,
    loss_masked_reconstruction,
    make_optimizer,
    sample_masked_nodes,
)
from mmpartition import ScenarioConfig, build_scenario

GCN = ModelSpec(Architecture.GCN, (TEXT, IMAGE), (8,), output_dim=3)
MMGCN = ModelSpec(Architecture.MMGCN, (TEXT, IMAGE), (6,), output_dim=3)


@pytest.fixture
def shards(small_sbm: MultimodalGraph) -> Tuple[ClientShard, ...]:
    config = ScenarioConfig(num_clients=3, master_seed=0)
    return build_scenario(small_sbm, config).shards


def federation(
    shards: Sequence[ClientShard],
    kind: AggregatorKind = AggregatorKind.FEDAVG,
    *,
    task: Optional[Task] = None,
    spec: ModelSpec = GCN,
    seed: int = 0,
    mu: float = 0.0,
    **config: Any,
) -> Tuple[ServerState, List[ClientState], Task]:
    task = task if task is not None else NodeClassification()
    fed_config = FederationConfig(aggregator=AggregatorConfig(kind, mu=mu), **config)
    server = init_server(spec, fed_config, task, len(shards), seed)
    return server, init_clients(server, shards, task), task


class FailingClassification(NodeClassification):
    """Node classification whose loss is NaN on the listed clients."""

    def __init__(self, failing: Sequence[int]) -> None:
        self.failing = set(failing)

    def loss(
        self,
        spec: ModelSpec,
        params: ParamVector,
        data: ClientData,
        seed: int,
        hidden_hook: Optional[HiddenHook] = None,
    ) -> Tuple[float, ParamVector]:
        loss, grads = super().loss(spec, params, data, seed, hidden_hook)
        if data.shard.client_id in self.failing:
            return float("nan"), grads
        return loss, grads


def test_sample_clients() -> None:
    assert sample_clients(5, 1.0, seed=0, round_index=3) == (0, 1, 2, 3, 4)
    picked = sample_clients(10, 0.3, seed=1, round_index=0)
    assert len(picked) == 3
    assert list(picked) == sorted(set(picked))
    assert picked == sample_clients(10, 0.3, seed=1, round_index=0)
    assert len(sample_clients(10, 0.01, seed=1, round_index=0)) == 1


def test_fedavg_round_traffic(shards: Tuple[ClientShard, ...]) -> None:
    server, clients, task = federation(shards)
    _, _, record = run_round(server, clients, task)
    size = param_payload_size(GCN.layout())
    assert size == 4 * GCN.layout().size + 8
    assert record.participants == (0, 1, 2)
    assert record.uplink_bytes == record.downlink_bytes == 3 * size
    assert record.total_bytes == 3 * 2 * size
    assert set(record.train_loss) == {0, 1, 2}


def test_partial_participation_traffic(small_sbm: MultimodalGraph) -> None:
    config = ScenarioConfig(num_clients=4, master_seed=0)
    shards = build_scenario(small_sbm, config).shards
    server, clients, task = federation(shards, participation=0.5)
    size = param_payload_size(GCN.layout())
    for _ in range(3):
        server, clients, record = run_round(server, clients, task)
        assert len(record.participants) == 2
        assert record.total_bytes == 2 * 2 * size
        assert set(record.train_loss) == set(record.participants)


def test_scaffold_round_traffic(shards: Tuple[ClientShard, ...]) -> None:
    server, clients, task = federation(shards, AggregatorKind.SCAFFOLD)
    _, clients, record = run_round(server, clients, task)
    size = param_payload_size(GCN.layout())
    assert record.uplink_bytes == record.downlink_bytes == 3 * 2 * size
    assert all(client.control is not None for client in clients)


def test_scaffold_controls_track_the_server(shards: Tuple[ClientShard, ...]) -> None:
    server, clients, task = federation(
        shards,
        AggregatorKind.SCAFFOLD,
        optimizer=OptimizerConfig(OptimizerKind.SGD),
        lr=0.05,
        local_epochs=2,
    )
    for _ in range(3):
        server, clients, _ = run_round(server, clients, task)
        assert server.control is not None
        total = np.sum([c.control.values for c in clients], axis=0, dtype=np.float64)
        np.testing.assert_allclose(
            total, len(clients) * server.control.values, atol=1e-5
        )


def test_fedproto_round_traffic(shards: Tuple[ClientShard, ...]) -> None:
    server, clients, task = federation(shards, AggregatorKind.FEDPROTO)
    size = prototype_payload_size(3, GCN.embedding_dim)
    assert size == 3 * 8 * 4 + 3 * 8
    server, clients, first = run_round(server, clients, task)
    assert first.uplink_bytes == 3 * size
    assert first.downlink_bytes == 0
    assert server.prototypes is not None
    assert server.prototypes.shape == (3, GCN.embedding_dim)
    server, clients, second = run_round(server, clients, task)
    assert second.downlink_bytes == 3 * size
    assert all(client.prototypes is not None for client in clients)


def test_fedproto_needs_node_classification(
    shards: Tuple[ClientShard, ...]
) -> None:
    with pytest.raises(TaskMismatch):
        federation(shards, AggregatorKind.FEDPROTO, task=LinkPrediction())


def test_fedprox_without_proximal_term_is_fedavg(
    shards: Tuple[ClientShard, ...]
) -> None:
    runs = []
    for kind in (AggregatorKind.FEDAVG, AggregatorKind.FEDPROX):
        server, clients, task = federation(shards, kind, mu=0.0, local_epochs=2)
        runs.append(run_federated(server, clients, task, rounds=3))
    fedavg, fedprox = runs
    assert fedavg.server.params.values.tobytes() == (
        fedprox.server.params.values.tobytes()
    )
    assert [r.metrics for r in fedavg.records] == [r.metrics for r in fedprox.records]


def test_fedprox_changes_the_trajectory(shards: Tuple[ClientShard, ...]) -> None:
    plain = run_federated(*federation(shards, local_epochs=3), rounds=2)
    proximal = run_federated(
        *federation(shards, AggregatorKind.FEDPROX, mu=1.0, local_epochs=3),
        rounds=2,
    )
    assert not np.array_equal(plain.server.params.values, proximal.server.params.values)


def test_fedprox_objective_gradient(shards: Tuple[ClientShard, ...]) -> None:
    task = NodeClassification()
    data = task.prepare(shards[0], seed=0)
    layout = GCN.layout()
    anchor = init_params(GCN, 0).astype(np.float64)
    mu = 0.1
    hook = fedprox_hook(anchor, mu)

    def loss_fn(values: np.ndarray) -> Tuple[float, np.ndarray]:
        params = ParamVector(layout, values)
        loss, grads = task.loss(GCN, params, data, 0)
        drift = values - anchor.values
        return loss + 0.5 * mu * float(drift @ drift), hook(params, grads).values

    start = anchor.values + make_rng(1).normal(0.0, 0.1, size=layout.size)
    assert grad_check(loss_fn, start, seed=0, step=1e-5) < 1e-4


def test_single_client_fedavg_is_centralized_training(
    small_sbm: MultimodalGraph,
) -> None:
    (shard,) = build_scenario(small_sbm, ScenarioConfig(num_clients=1)).shards
    optimizer = OptimizerConfig(OptimizerKind.SGD, weight_decay=1e-4)
    server, clients, task = federation([shard], optimizer=optimizer, lr=0.05)
    run = run_federated(server, clients, task, rounds=10)

    central = make_optimizer(server.config.optimizer_for(task))
    params = server.params.copy()
    for _ in range(10):
        _, grads = task.loss(GCN, params, clients[0].data, 0)
        params = central.step(params, grads)
    np.testing.assert_allclose(run.server.params.values, params.values, atol=1e-6)


def test_diverged_client_is_left_out(shards: Tuple[ClientShard, ...]) -> None:
    server, clients, _ = federation(shards)
    task = FailingClassification([1])
    new_server, _, record = run_round(server, clients, task)
    size = param_payload_size(GCN.layout())
    assert record.diverged == (1,)
    assert set(record.train_loss) == {0, 2}
    assert record.uplink_bytes == 2 * size
    assert record.downlink_bytes == 3 * size
    assert not np.array_equal(new_server.params.values, server.params.values)


def test_round_without_survivors_keeps_the_model(
    shards: Tuple[ClientShard, ...]
) -> None:
    server, clients, _ = federation(shards)
    task = FailingClassification([0, 1, 2])
    new_server, _, record = run_round(server, clients, task)
    assert record.diverged == (0, 1, 2)
    assert new_server.round_index == 1
    assert new_server.params.values.tobytes() == server.params.values.tobytes()


def test_runs_are_deterministic(shards: Tuple[ClientShard, ...]) -> None:
    records = []
    for workers in (None, 3):
        server, clients, task = federation(shards, participation=0.7)
        if workers is None:
            run = run_federated(server, clients, task, rounds=3)
        else:
            with ThreadPoolExecutor(workers) as executor:
                run = run_federated(server, clients, task, 3, executor=executor)
        records.append([r.to_dict(timing=False) for r in run.records])
    assert records[0] == records[1]
    assert "wall_ms" not in records[0][0]


def test_global_evaluation_pools_client_samples(
    shards: Tuple[ClientShard, ...]
) -> None:
    server, clients, task = federation(shards)
    metrics, per_client = evaluate(server, clients, task)
    assert set(metrics) == {"accuracy", "precision", "recall", "f1"}
    sizes = {c.client_id: int(c.shard.splits.test.sum()) for c in clients}
    pooled = sum(per_client[cid]["accuracy"] * n for cid, n in sizes.items())
    assert metrics["accuracy"] == pytest.approx(pooled / sum(sizes.values()))


def test_macro_average() -> None:
    per_client = {0: {"a": 1.0, "b": 2.0}, 1: {"a": 3.0}}
    assert macro_average(per_client) == {"a": 2.0, "b": 2.0}


@pytest.mark.parametrize(
    "task, spec, metrics",
    [
        (NodeClassification(), GCN, {"accuracy", "precision", "recall", "f1"}),
        (LinkPrediction(), GCN, {"auc", "ap"}),
        (ModalityContrastive("text", "image"), MMGCN, {"auc", "ap"}),
        (
            ModalityContrastive("text", "image", mode="retrieval", k=5),
            MMGCN,
            {"recall@5", "mrr"},
        ),
        (
            MaskedReconstruction(0.3),
            ModelSpec(Architecture.GCN, (TEXT, IMAGE), (8,), 3, reconstruction=True),
            {"recon_mse"},
        ),
    ],
    ids=["node", "link", "matching", "retrieval", "reconstruction"],
)
def test_every_task_trains_and_reports(
    shards: Tuple[ClientShard, ...], task: Task, spec: ModelSpec, metrics: set
) -> None:
    run = run_federated(*federation(shards, task=task, spec=spec), rounds=2)
    assert len(run.records) == 2
    assert set(run.final_metrics) == metrics
    assert all(np.isfinite(list(r.train_loss.values())).all() for r in run.records)
    assert len(run.curve(task.primary_metric)) == 2


def test_self_supervised_prefixes_metrics(shards: Tuple[ClientShard, ...]) -> None:
    spec = ModelSpec(
        Architecture.MMGCN, (TEXT, IMAGE), (6,), 3, reconstruction=True
    )
    task = SelfSupervised(
        [(LinkPrediction(on_hidden=True), 1.0), (MaskedReconstruction(0.2), 0.5)]
    )
    assert task.primary_metric == "link_prediction.auc"
    run = run_federated(*federation(shards, task=task, spec=spec), rounds=1)
    assert set(run.final_metrics) == {
        "link_prediction.auc",
        "link_prediction.ap",
        "masked_reconstruction.recon_mse",
    }
    with pytest.raises(TaskMismatch):
        SelfSupervised([])


def test_task_spec_mismatches(shards: Tuple[ClientShard, ...]) -> None:
    with pytest.raises(TaskMismatch):
        federation(shards, task=ModalityContrastive("text", "image"))
    with pytest.raises(TaskMismatch):
        federation(shards, task=MaskedReconstruction())
    with pytest.raises(TaskMismatch):
        ModalityContrastive("text", "image", mode="captioning")


def test_link_tasks_hide_held_out_edges(shards: Tuple[ClientShard, ...]) -> None:
    data = LinkPrediction().prepare(shards[0], seed=0)
    held_out = len(data.edge_split.val) + len(data.edge_split.test)
    assert data.batch.adjacency.nnz == 2 * len(data.edge_split.train) + data.num_nodes
    assert held_out == shards[0].graph.num_edges - len(data.edge_split.train)


def test_reconstruction_scores_only_the_requested_split(
    shards: Tuple[ClientShard, ...]
) -> None:
    spec = ModelSpec(Architecture.GCN, (TEXT, IMAGE), (8,), 3, reconstruction=True)
    params = init_params(spec, 0)
    task = MaskedReconstruction(0.3)
    data = task.prepare(shards[0], seed=0)
    scores = {
        split: task.collect(spec, params, data, split, seed=5)
        for split in ("train", "val", "test")
    }
    for split, (_, count) in scores.items():
        assert count == data.node_mask(split).sum()
    assert scores["train"] != scores["test"]
    assert task.num_samples(data) == data.node_mask("train").sum()

    test_nodes = np.flatnonzero(data.node_mask("test"))
    assert set(sample_masked_nodes(test_nodes, 0.3, 5)) <= set(test_nodes)
    loss, _ = loss_masked_reconstruction(spec, params, data.batch, 0.3, 5, test_nodes)
    assert scores["test"][0] == loss


def test_split_edges_partitions_edges() -> None:
    edges = np.array([(u, u + 1) for u in range(10)])
    split = split_edges(edges, seed=3)
    assert [len(split.train), len(split.val), len(split.test)] == [8, 1, 1]
    joined = np.concatenate([split.train, split.val, split.test])
    assert sorted(map(tuple, joined.tolist())) == sorted(map(tuple, edges.tolist()))


def test_isolated_training_never_communicates(
    shards: Tuple[ClientShard, ...]
) -> None:
    server, clients, task = federation(shards, local_epochs=2)
    trained, report = run_isolated(server, clients, task, epochs=3)
    assert set(report.per_client) == {0, 1, 2}
    assert set(report.metrics) == {"accuracy", "precision", "recall", "f1"}
    assert not any(
        np.array_equal(a.params.values, b.params.values)
        for a, b in itertools.combinations(trained, 2)
    )
    again, _ = run_isolated(server, trained, task, epochs=1, reset=False)
    restarted, _ = run_isolated(server, trained, task, epochs=1)
    assert not np.array_equal(again[0].params.values, restarted[0].params.values)


def test_early_stopping_keeps_best_parameters(
    shards: Tuple[ClientShard, ...]
) -> None:
    server, clients, task = federation(shards)
    client, _ = local_train_early_stopping(
        clients[0], task, GCN, epochs=0, seed=0, patience=1
    )
    assert client.params is clients[0].params
    client, loss = local_train_early_stopping(
        clients[0], task, GCN, epochs=5, seed=0, patience=1
    )
    assert np.isfinite(loss)


def test_two_stage_pretraining(shards: Tuple[ClientShard, ...]) -> None:
    server, clients, pretrain = federation(shards, task=LinkPrediction(on_hidden=True))
    report = run_two_stage(
        server, clients, pretrain, NodeClassification(), 2, finetune_epochs=3
    )
    assert len(report.pretrain.records) == 2
    assert set(report.before.per_client) == {0, 1, 2}
    assert set(report.after.metrics) == {"accuracy", "precision", "recall", "f1"}
    assert report.pretrain.final_metrics.keys() == {"auc", "ap"}
