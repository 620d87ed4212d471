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
import textwrap
from pathlib import Path
from typing import Dict, List, Sequence

import pytest

from mmnn import Architecture
from mmpartition import LabelMode, ModalityMode, TopologyMode
from mmperturb import PerturbKind
from mmrunner import (
    Algorithm,
    MatrixConfig,
    PerturbConfig,
    ScenarioSection,
    expand_matrix,
    parse_config,
    run_experiment,
    run_seed,
    run_sweep,
)

SEEDS = "0, 1, 2, 3, 4"

SEPARABLE = f"""
dataset:
  num_classes: 3
  nodes_per_class: 100
  sbm:
    intra_p: 0.04
    inter_p: 0.005
  feat:
    sigma: 1.0
    separation: {{separation}}
  {{informative}}
  modalities:
    text: 16
    image: 16
scenario:
  num_clients: 1
model:
  hidden: 32
fed:
  rounds: 100
  lr: 0.01
seeds: {SEEDS}
"""


def _matrix(
    separation: float = 1.0, informative: str = "", extra: str = ""
) -> MatrixConfig:
    text = SEPARABLE.format(
        separation=separation,
        informative=f"  informative_modalities: {informative}" if informative else "",
    )
    return parse_config(textwrap.dedent(text) + textwrap.dedent(extra))


def _model(
    matrix: MatrixConfig, architecture: Architecture, modalities: Sequence[str]
) -> MatrixConfig:
    model = dataclasses.replace(
        matrix.model, architecture=architecture, modalities=tuple(modalities)
    )
    return dataclasses.replace(matrix, model=model)


def _final_accuracy(matrix: MatrixConfig, out: Path) -> float:
    (summary,) = run_experiment(matrix, out).summary
    assert summary["failed"] == 0
    return float(summary["accuracy_mean"])


def _sweep_means(matrix: MatrixConfig, out: Path) -> List[float]:
    return [row["mean"] for row in run_sweep(matrix, out)]


def test_prototypes_are_cheaper_than_models() -> None:
    matrix = parse_config(
        textwrap.dedent(
            """
            dataset:
              num_classes: 3
              nodes_per_class: 20
              modalities:
                text: 16
                image: 16
            scenario:
              num_clients: 2
            fed:
              algorithm: fedavg, fedproto
              rounds: 2
            """
        )
    )
    uplink: Dict[str, int] = {}
    for cell in expand_matrix(matrix):
        run = run_seed(cell, 0)
        assert [row["status"] for row in run.rows] == ["ok", "ok"]
        uplink[cell.algorithm.value] = run.rows[-1]["uplink_bytes"]
    assert 0 < uplink["fedproto"] < uplink["fedavg"]


@pytest.mark.slow
def test_every_scenario_cell_completes(tmp_path: Path) -> None:
    matrix = _matrix()
    scenario = ScenarioSection(
        modality=(ModalityMode.IID, ModalityMode.NONIID),
        topology=(TopologyMode.AVAILABLE, TopologyMode.SBM),
        label=(LabelMode.IID, LabelMode.LOUVAIN),
        num_clients=3,
    )
    matrix = dataclasses.replace(
        matrix,
        scenario=scenario,
        fed=dataclasses.replace(matrix.fed, rounds=5),
        seeds=(0,),
    )
    table = run_experiment(matrix, tmp_path)
    assert len(table.summary) == 8
    assert len({row["scenario"] for row in table.rows}) == 8
    assert all(row["status"] == "ok" for row in table.rows)
    assert len(table.rows) == 8 * 5


@pytest.mark.slow
def test_second_modality_and_structure_both_help(tmp_path: Path) -> None:
    matrix = _matrix()
    fused = _final_accuracy(
        _model(matrix, Architecture.MMGCN, ("text", "image")), tmp_path / "mmgcn"
    )
    single = _final_accuracy(
        _model(matrix, Architecture.GCN, ("text",)), tmp_path / "gcn"
    )
    flat = _final_accuracy(
        _model(matrix, Architecture.MLP, ("text",)), tmp_path / "mlp"
    )
    assert fused >= single + 0.02
    assert single >= flat + 0.02


@pytest.mark.slow
def test_missing_informative_modality_degrades_accuracy(tmp_path: Path) -> None:
    matrix = _matrix(
        separation=2.0,
        informative="image",
        extra="""
        perturb:
          kind: modality_missing
          target_modality: image
          ratios: 0.0, 0.25, 0.5, 0.75, 1.0
        """,
    )
    means = _sweep_means(matrix, tmp_path)
    for before, after in zip(means, means[1:]):
        assert after <= before + 0.01
    assert means[0] - means[-1] > 0.05


@pytest.mark.slow
def test_label_noise_hurts_more_than_edge_sparsity(tmp_path: Path) -> None:
    base = _matrix(separation=2.0)
    base = _model(base, Architecture.GCN, ("text", "image"))

    def degradation(kind: str, out: Path) -> float:
        perturb = PerturbConfig(PerturbKind(kind), ratios=(0.0, 0.9))
        clean, perturbed = _sweep_means(
            dataclasses.replace(base, perturb=perturb), out
        )
        return clean - perturbed

    label = degradation("label_noise", tmp_path / "labels")
    edges = degradation("edge_sparsify", tmp_path / "edges")
    assert label >= 0.10
    assert edges < label


@pytest.mark.slow
def test_isolated_training_sends_nothing_and_still_learns(tmp_path: Path) -> None:
    matrix = _matrix(separation=2.0)
    matrix = dataclasses.replace(
        matrix,
        fed=dataclasses.replace(matrix.fed, algorithms=(Algorithm.ISOLATED,)),
    )
    table = run_experiment(matrix, tmp_path)
    (summary,) = table.summary
    assert summary["uplink_bytes"] == 0.0
    assert summary["accuracy_mean"] > 0.6
