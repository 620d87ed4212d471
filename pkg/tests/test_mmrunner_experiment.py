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

import dataclasses
import json
import logging
import textwrap
from pathlib import Path
from typing import List

import pytest

from mmfederation import (
    LinkPrediction,
    MaskedReconstruction,
    ModalityContrastive,
    NodeClassification,
    SelfSupervised,
)
from mmnn import Architecture
from mmrunner import (
    ANALYSIS_FILE,
    RESULTS_FILE,
    SUMMARY_FILE,
    SWEEP_FILE,
    TIMINGS_FILE,
    Algorithm,
    ConfigError,
    MatrixConfig,
    PretrainConfig,
    TaskKind,
    build_shards,
    clear_cache,
    expand_matrix,
    load_base_graph,
    make_pretrain_task,
    make_spec,
    make_task,
    parse_config,
    run_experiment,
    run_seed,
    run_sweep,
)

TINY = """
name: tiny
dataset:
  num_classes: 2
  nodes_per_class: 15
  sbm:
    intra_p: 0.3
    inter_p: 0.02
  modalities:
    text: 4
    image: 3
scenario:
  num_clients: 2
model:
  architecture: gcn
  hidden: 8
fed:
  rounds: 5
  lr: 0.05
seeds: 0, 1
"""


def _matrix(extra: str = "") -> MatrixConfig:
    return parse_config(textwrap.dedent(TINY) + textwrap.dedent(extra))


def _with(matrix: MatrixConfig, **changes: object) -> MatrixConfig:
    return dataclasses.replace(matrix, **changes)  # type: ignore[arg-type]


def _algorithm(matrix: MatrixConfig, algorithm: Algorithm) -> MatrixConfig:
    return _with(matrix, fed=dataclasses.replace(matrix.fed, algorithms=(algorithm,)))


def _lines(path: Path) -> List[str]:
    return path.read_text(encoding="utf-8").splitlines()


def test_run_writes_a_row_per_seed_and_round(tmp_path: Path) -> None:
    table = run_experiment(_matrix(), tmp_path)
    assert [(row["seed"], row["round"]) for row in table.rows] == [
        (seed, index) for seed in (0, 1) for index in range(1, 6)
    ]
    for row in table.rows:
        assert row["status"] == "ok"
        assert row["stage"] == "federated"
        assert row["scenario"] == "iid/available/iid"
        assert row["algorithm"] == "fedavg"
        assert row["ratio"] is None
        assert 0.0 <= row["metrics"]["accuracy"] <= 1.0
        assert row["uplink_bytes"] > 0
        assert "wall_ms" not in row

    assert len(_lines(tmp_path / RESULTS_FILE)) == 10
    timings = [json.loads(line) for line in _lines(tmp_path / TIMINGS_FILE)]
    assert len(timings) == 10
    assert all(timing["wall_ms"] >= 0 for timing in timings)
    assert (tmp_path / SUMMARY_FILE).exists()
    (summary,) = table.summary
    assert summary["seeds"] == 2
    assert summary["rounds"] == 5
    assert summary["failed"] == 0


def test_run_writes_the_shard_analysis(tmp_path: Path) -> None:
    run_experiment(_matrix(), tmp_path)
    reports = [json.loads(line) for line in _lines(tmp_path / ANALYSIS_FILE)]
    assert [report["seed"] for report in reports] == [0, 1]
    for report in reports:
        assert report["scenario"] == "iid/available/iid"
        assert report["algorithm"] == "fedavg"
        assert report["meta.kl_direction"] == "client||global"
        assert report["feature_kl.0"] >= 0.0
        assert report["feature_kl_pairwise.0.0"] == 0.0
        assert report["feature_kl_pairwise.0.1"] > 0.0
        assert 0.0 <= report["edge_homophily_mean"] <= 1.0
        assert report["degree_mean.1"] > 0.0
        assert report["disparity.degree_mean_std"] >= 0.0


def test_reruns_are_byte_identical(tmp_path: Path) -> None:
    matrix = _matrix()
    run_experiment(matrix, tmp_path / "first", workers=1)
    clear_cache()
    run_experiment(matrix, tmp_path / "second", workers=3)
    for name in (RESULTS_FILE, SUMMARY_FILE, ANALYSIS_FILE):
        first = (tmp_path / "first" / name).read_bytes()
        assert first == (tmp_path / "second" / name).read_bytes()


def test_seeds_change_the_run(tmp_path: Path) -> None:
    table = run_experiment(_matrix(), tmp_path)
    losses = {row["seed"]: row["train_loss"] for row in table.rows if row["round"] == 1}
    assert losses[0] != losses[1]


def test_metrics_filter() -> None:
    matrix = _with(_matrix("metrics: accuracy, f1\n"), seeds=(0,))
    (cell,) = expand_matrix(matrix)
    run = run_seed(cell, 0)
    assert all(list(row["metrics"]) == ["accuracy", "f1"] for row in run.rows)
    assert len(run.timings) == len(run.rows)


def test_failed_runs_become_failure_rows(
    tmp_path: Path, caplog: pytest.LogCaptureFixture
) -> None:
    matrix = _with(
        _algorithm(_matrix(), Algorithm.ISOLATED),
        pretrain=PretrainConfig(objective=(("link_prediction", 1.0),), rounds=2),
    )
    with caplog.at_level(logging.ERROR, logger="mmfgl.mmrunner"):
        table = run_experiment(matrix, tmp_path)
    assert [row["status"] for row in table.rows] == ["failed", "failed"]
    assert {row["error"] for row in table.rows} == {"ConfigError"}
    assert [row["seed"] for row in table.rows] == [0, 1]
    (summary,) = table.summary
    assert summary["seeds"] == 0
    assert summary["failed"] == 2
    assert _lines(tmp_path / TIMINGS_FILE) == []
    assert "failed" in caplog.text


def test_isolated_rounds_send_nothing() -> None:
    matrix = _with(_algorithm(_matrix(), Algorithm.ISOLATED), seeds=(0,))
    (cell,) = expand_matrix(matrix)
    run = run_seed(cell, 0)
    assert [row["round"] for row in run.rows] == [1, 2, 3, 4, 5]
    for row in run.rows:
        assert row["status"] == "ok"
        assert row["stage"] == "isolated"
        assert row["uplink_bytes"] == row["downlink_bytes"] == 0
        assert "accuracy" in row["metrics"]


@pytest.mark.parametrize(
    "algorithm", [Algorithm.FEDPROX, Algorithm.SCAFFOLD, Algorithm.FEDPROTO]
)
def test_every_algorithm_runs(algorithm: Algorithm) -> None:
    matrix = _with(_algorithm(_matrix(), algorithm), seeds=(0,))
    (cell,) = expand_matrix(matrix)
    run = run_seed(cell, 0)
    assert [row["status"] for row in run.rows] == ["ok"] * 5
    assert {row["algorithm"] for row in run.rows} == {algorithm.value}


def test_pretraining_then_finetuning() -> None:
    matrix = _matrix(
        """
        pretrain:
          objective: link_prediction
          rounds: 2
          finetune_epochs: 3
        """
    )
    (cell,) = expand_matrix(_with(matrix, seeds=(0,)))
    run = run_seed(cell, 0)
    assert [row["stage"] for row in run.rows] == ["pretrain", "pretrain", "finetune"]
    finetune = run.rows[-1]
    assert finetune["round"] == 3
    assert "accuracy" in finetune["metrics"]
    assert "before.accuracy" in finetune["metrics"]
    assert finetune["uplink_bytes"] == 0
    assert all(row["uplink_bytes"] > 0 for row in run.rows[:2])


def test_perturbation_ratios_are_summarized_apart(tmp_path: Path) -> None:
    matrix = _matrix(
        """
        perturb:
          kind: feature_noise
          ratios: 0.0, 2.0
        """
    )
    table = run_experiment(_with(matrix, seeds=(0,)), tmp_path)
    assert [s["ratio"] for s in table.summary] == [0.0, 2.0]
    assert all(row["status"] == "ok" for row in table.rows)


def test_build_shards_restricts_modalities() -> None:
    matrix = _matrix()
    matrix = _with(
        matrix, model=dataclasses.replace(matrix.model, modalities=("image",))
    )
    (cell,) = expand_matrix(matrix)
    shards, num_classes = build_shards(cell, 0)
    assert num_classes == 2
    assert len(shards) == 2
    for shard in shards:
        assert shard.graph.modality_names == ("image",)


def test_base_graph_is_cached_per_seed() -> None:
    dataset = _matrix().dataset
    assert load_base_graph(dataset, 0) is load_base_graph(dataset, 0)
    assert load_base_graph(dataset, 0) is not load_base_graph(dataset, 1)
    first = load_base_graph(dataset, 0)
    clear_cache()
    assert load_base_graph(dataset, 0) is not first


def test_task_and_spec_factories() -> None:
    (cell,) = expand_matrix(_matrix())
    modalities = load_base_graph(cell.dataset, 0).modalities
    assert isinstance(make_task(cell, modalities), NodeClassification)
    assert make_spec(cell, modalities, 2).output_dim == 2

    link = dataclasses.replace(cell, task=TaskKind.LINK_PREDICTION)
    assert isinstance(make_task(link, modalities), LinkPrediction)
    assert make_spec(link, modalities, 2).output_dim == 8

    retrieval = dataclasses.replace(
        cell, task=TaskKind.MODALITY_RETRIEVAL, retrieval_k=3
    )
    task = make_task(retrieval, modalities)
    assert isinstance(task, ModalityContrastive)
    assert (task.modality_a, task.modality_b) == ("text", "image")
    assert task.mode == "retrieval"
    assert task.k == 3

    with pytest.raises(ConfigError):
        make_task(retrieval, modalities[:1])


def test_pretrain_task_factory() -> None:
    (cell,) = expand_matrix(_matrix())
    modalities = load_base_graph(cell.dataset, 0).modalities
    single = dataclasses.replace(
        cell, pretrain=PretrainConfig(objective=(("link_prediction", 1.0),))
    )
    task = make_pretrain_task(single, modalities)
    assert isinstance(task, LinkPrediction)
    assert task.on_hidden

    mixed = dataclasses.replace(
        cell,
        pretrain=PretrainConfig(
            objective=(("masked_reconstruction", 1.0), ("contrastive", 0.5))
        ),
    )
    combined = make_pretrain_task(mixed, modalities)
    assert isinstance(combined, SelfSupervised)
    first, second = combined.components
    assert isinstance(first[0], MaskedReconstruction)
    assert isinstance(second[0], ModalityContrastive)
    assert second[1] == 0.5
    assert make_spec(mixed, modalities, 2).reconstruction


def test_sweep_writes_a_point_per_ratio(tmp_path: Path) -> None:
    matrix = _matrix(
        """
        perturb:
          kind: edge_sparsify
          ratios: 0.0, 0.5
        """
    )
    rows = run_sweep(_with(matrix, seeds=(0, 1)), tmp_path)
    assert [row["ratio"] for row in rows] == [0.0, 0.5]
    assert all(row["seeds"] == 2 for row in rows)
    assert all(row["kind"] == "edge_sparsify" for row in rows)
    lines = _lines(tmp_path / SWEEP_FILE)
    assert lines[0] == "scenario,algorithm,kind,ratio,mean,stderr,seeds"
    assert len(lines) == 3


def test_sweep_needs_a_perturbation(tmp_path: Path) -> None:
    with pytest.raises(ConfigError):
        run_sweep(_matrix(), tmp_path)


@pytest.mark.slow
def test_training_beats_chance_on_separable_graph(tmp_path: Path) -> None:
    matrix = _matrix()
    matrix = _with(matrix, fed=dataclasses.replace(matrix.fed, rounds=30))
    table = run_experiment(matrix, tmp_path)
    (summary,) = table.summary
    assert summary["accuracy_mean"] > 0.75


@pytest.mark.slow
def test_heavy_feature_noise_hurts(tmp_path: Path) -> None:
    matrix = _matrix(
        """
        perturb:
          kind: feature_noise
          ratios: 0.0, 10.0
          seeds: 0, 1, 2
        """
    )
    matrix = _with(
        matrix,
        fed=dataclasses.replace(matrix.fed, rounds=30),
        model=dataclasses.replace(matrix.model, architecture=Architecture.MLP),
    )
    clean, noisy = run_sweep(matrix, tmp_path)
    assert clean["mean"] > noisy["mean"] + 0.1
