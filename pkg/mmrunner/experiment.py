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
Execution of experiment cells.

A cell runs once per seed. Every run derives its stage seeds from the run
seed alone (``dataset``, ``scenario``, ``perturb``, ``federation``), so
running seeds in parallel or in another order never changes a row.
"""

from __future__ import annotations

import contextlib
import csv
import dataclasses
import time
from concurrent.futures import Executor, ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from mmfederation import (
    ClientState,
    LinkPrediction,
    MaskedReconstruction,
    ModalityContrastive,
    NodeClassification,
    RoundRecord,
    SelfSupervised,
    ServerState,
    Task,
    init_clients,
    init_server,
    make_eval_hook,
    run_isolated,
    run_round,
    run_two_stage,
)
from mmgraph import ClientShard, Modality, derive_seed
from mmnn import ModelSpec
from mmpartition import build_scenario
from mmperturb import SweepPoint, apply_perturbation, sweep

from .analysis import ANALYSIS_FILE, analyze_shards
from .config import Algorithm, ExperimentConfig, MatrixConfig, TaskKind, expand_matrix
from .datasets import load_base_graph, select_modalities
from .errors import ConfigError
from .log import log
from .results import (
    RESULTS_FILE,
    TIMINGS_FILE,
    JsonLinesWriter,
    ResultsTable,
    format_cell,
)
from .scaling import CostModel
from .utils import atomic_writer, natural_size

__all__ = (
    "SWEEP_FILE",
    "SeedRun",
    "TrainOutcome",
    "make_spec",
    "make_task",
    "make_pretrain_task",
    "build_shards",
    "train_cell",
    "run_seed",
    "run_experiment",
    "run_sweep",
)

SWEEP_FILE = "sweep.csv"
_SWEEP_COLUMNS = ("scenario", "algorithm", "kind", "ratio", "mean", "stderr", "seeds")

Row = Dict[str, Any]


@dataclass
class TrainOutcome:
    """Per-round rows of one training run, without the cell's identifying keys."""

    primary_metric: str
    rows: List[Row] = field(default_factory=list)
    wall_ms: List[float] = field(default_factory=list)

    @property
    def final_metric(self) -> float:
        """Primary metric of the last row, NaN when it is missing."""
        if not self.rows:
            return float("nan")
        return float(self.rows[-1]["metrics"].get(self.primary_metric, float("nan")))


@dataclass
class SeedRun:
    rows: List[Row]
    timings: List[Row]
    #: data analysis of the run's shards, None when the run failed early
    analysis: Optional[Row] = None


def make_spec(
    cell: ExperimentConfig, modalities: Sequence[Modality], num_classes: int
) -> ModelSpec:
    """
    Backbone of a cell.

    Node classification gets a C-way head; other tasks use the head as a
    projection as wide as the last hidden layer. A reconstruction head is
    added when masked reconstruction is a pretraining objective.
    """
    model = cell.model
    if cell.task is TaskKind.NODE_CLASSIFICATION:
        output_dim = num_classes
    else:
        output_dim = model.hidden[-1]
    objectives = {name for name, _ in cell.pretrain.objective}
    return ModelSpec(
        architecture=model.architecture,
        modalities=tuple(modalities),
        hidden=model.hidden,
        output_dim=output_dim,
        fusion=model.fusion,
        reconstruction="masked_reconstruction" in objectives,
    )


def _modality_pair(modalities: Sequence[Modality]) -> Tuple[str, str]:
    if len(modalities) < 2:
        raise ConfigError("Cross-modal objectives need at least two modalities")
    return modalities[0].name, modalities[1].name


def make_task(cell: ExperimentConfig, modalities: Sequence[Modality]) -> Task:
    """Downstream task of a cell; cross-modal tasks pair the first two modalities."""
    if cell.task is TaskKind.NODE_CLASSIFICATION:
        return NodeClassification()
    if cell.task is TaskKind.LINK_PREDICTION:
        return LinkPrediction()
    first, second = _modality_pair(modalities)
    if cell.task is TaskKind.MODALITY_MATCHING:
        return ModalityContrastive(first, second, mode="matching")
    return ModalityContrastive(first, second, mode="retrieval", k=cell.retrieval_k)


def make_pretrain_task(cell: ExperimentConfig, modalities: Sequence[Modality]) -> Task:
    """
    Self-supervised objective of the pretraining stage.

    Link prediction scores backbone embeddings so the downstream head stays
    at its initial value until fine-tuning.
    """
    components: List[Tuple[Task, float]] = []
    for name, weight in cell.pretrain.objective:
        task: Task
        if name == "link_prediction":
            task = LinkPrediction(on_hidden=True)
        elif name == "masked_reconstruction":
            task = MaskedReconstruction(cell.pretrain.mask_fraction)
        else:
            task = ModalityContrastive(*_modality_pair(modalities))
        components.append((task, weight))
    if len(components) == 1 and components[0][1] == 1.0:
        return components[0][0]
    return SelfSupervised(components)


def build_shards(cell: ExperimentConfig, seed: int) -> Tuple[List[ClientShard], int]:
    """
    Client shards of one run and the class count of the base graph.

    The base graph is partitioned, every shard is perturbed with its own
    seed and finally restricted to the model's modalities.
    """
    graph = load_base_graph(cell.dataset, derive_seed(seed, "dataset"))
    scenario = dataclasses.replace(
        cell.scenario, master_seed=derive_seed(seed, "scenario")
    )
    result = build_scenario(graph, scenario)
    report = result.axis_report
    log.debug("Scenario %s seed %s: %s", scenario.name, seed, report)
    shards = list(result.shards)
    if cell.perturb is not None:
        shards = apply_perturbation(
            shards, cell.perturb.with_seed(derive_seed(seed, "perturb"))
        )
    if cell.model.modalities:
        shards = [select_modalities(s, cell.model.modalities) for s in shards]
    return shards, graph.num_classes


def _select(metrics: Dict[str, float], wanted: Optional[Sequence[str]]) -> Row:
    if wanted is None:
        return dict(sorted(metrics.items()))
    return {
        key: value
        for key, value in sorted(metrics.items())
        if key in wanted or key.rsplit(".", 1)[-1] in wanted
    }


def _record_row(
    stage: str, record: RoundRecord, wanted: Optional[Sequence[str]]
) -> Row:
    row = record.to_dict(timing=False)
    row["stage"] = stage
    row["metrics"] = _select(record.metrics, wanted)
    return row


def _local_row(
    stage: str,
    round_index: int,
    clients: Sequence[ClientState],
    metrics: Dict[str, float],
    wanted: Optional[Sequence[str]],
) -> Row:
    return {
        "stage": stage,
        "round": round_index,
        "participants": [c.client_id for c in clients],
        "diverged": [],
        "train_loss": {},
        "metrics": _select(metrics, wanted),
        "uplink_bytes": 0,
        "downlink_bytes": 0,
    }


def _run_federated(
    cell: ExperimentConfig,
    server: ServerState,
    clients: List[ClientState],
    task: Task,
    outcome: TrainOutcome,
    executor: Optional[Executor],
) -> None:
    hook = make_eval_hook(task)
    for _ in range(cell.fed.rounds):
        server, clients, record = run_round(server, clients, task, hook, executor)
        outcome.rows.append(_record_row("federated", record, cell.metrics))
        outcome.wall_ms.append(record.wall_ms)


def _run_isolated(
    cell: ExperimentConfig,
    server: ServerState,
    clients: List[ClientState],
    task: Task,
    outcome: TrainOutcome,
    executor: Optional[Executor],
) -> None:
    # one "round" is local_epochs epochs of training, so curves line up with
    # the federated algorithms
    for round_index in range(1, cell.fed.rounds + 1):
        start = time.perf_counter()
        chunk_server = server.replace(seed=derive_seed(server.seed, round_index))
        clients, report = run_isolated(
            chunk_server,
            clients,
            task,
            cell.fed.local_epochs,
            executor=executor,
            reset=round_index == 1,
        )
        outcome.rows.append(
            _local_row("isolated", round_index, clients, report.metrics, cell.metrics)
        )
        outcome.wall_ms.append((time.perf_counter() - start) * 1000.0)


def _run_pretrain(
    cell: ExperimentConfig,
    server: ServerState,
    clients: List[ClientState],
    pretrain_task: Task,
    task: Task,
    outcome: TrainOutcome,
    executor: Optional[Executor],
) -> None:
    start = time.perf_counter()
    report = run_two_stage(
        server,
        clients,
        pretrain_task,
        task,
        cell.pretrain.rounds,
        cell.pretrain.finetune_epochs,
        finetune_backbone=cell.pretrain.finetune_backbone,
        patience=cell.pretrain.patience,
        executor=executor,
    )
    pretrain_ms = 0.0
    for record in report.pretrain.records:
        outcome.rows.append(_record_row("pretrain", record, cell.metrics))
        outcome.wall_ms.append(record.wall_ms)
        pretrain_ms += record.wall_ms
    metrics = dict(report.after.metrics)
    metrics.update({f"before.{k}": v for k, v in report.before.metrics.items()})
    outcome.rows.append(
        _local_row(
            "finetune",
            cell.pretrain.rounds + 1,
            report.pretrain.clients,
            metrics,
            cell.metrics,
        )
    )
    total_ms = (time.perf_counter() - start) * 1000.0
    outcome.wall_ms.append(max(total_ms - pretrain_ms, 0.0))


def train_cell(
    cell: ExperimentConfig,
    shards: Sequence[ClientShard],
    num_classes: int,
    seed: int,
    executor: Optional[Executor] = None,
) -> TrainOutcome:
    """
    Train ``cell`` on ready-made shards and evaluate after every round.

    Runs the federated protocol, isolated local training, or federated
    pretraining followed by local fine-tuning, depending on the cell.
    """
    modalities = shards[0].graph.modalities
    spec = make_spec(cell, modalities, num_classes)
    task = make_task(cell, modalities)
    pretrain_task = None
    if cell.pretrain.enabled:
        if cell.algorithm is Algorithm.ISOLATED:
            raise ConfigError("Isolated training can't be combined with pretraining")
        pretrain_task = make_pretrain_task(cell, modalities)

    federation_seed = derive_seed(seed, "federation")
    server = init_server(
        spec,
        cell.federation_config,
        pretrain_task or task,
        len(shards),
        federation_seed,
    )
    clients = init_clients(server, shards, pretrain_task or task)
    cost = CostModel.from_spec(spec, shards, num_classes)
    log.debug("Cost model of %s: %s", cell.key, cost.to_dict(server.aggregator.kind))

    outcome = TrainOutcome(primary_metric=task.primary_metric)
    if cell.algorithm is Algorithm.ISOLATED:
        _run_isolated(cell, server, clients, task, outcome, executor)
    elif pretrain_task is not None:
        _run_pretrain(cell, server, clients, pretrain_task, task, outcome, executor)
    else:
        _run_federated(cell, server, clients, task, outcome, executor)
    return outcome


def _cell_keys(cell: ExperimentConfig, seed: int) -> Row:
    return {
        "scenario": cell.scenario.name,
        "algorithm": cell.algorithm.value,
        "ratio": cell.ratio,
        "seed": seed,
    }


def run_seed(
    cell: ExperimentConfig, seed: int, executor: Optional[Executor] = None
) -> SeedRun:
    """
    Run one seed of ``cell``.

    Any exception is logged and turned into a single failure row carrying
    the exception class; rows of a failed run are never partially kept.
    """
    keys = _cell_keys(cell, seed)
    analysis: Optional[Row] = None
    try:
        shards, num_classes = build_shards(cell, seed)
        analysis = {**keys, **analyze_shards(shards).flat()}
        outcome = train_cell(cell, shards, num_classes, seed, executor)
    except Exception as e:
        log.exception("Run of %s with seed %s failed", cell.key, seed)
        failure = {**keys, "status": "failed", "error": type(e).__name__}
        failure["message"] = str(e)
        return SeedRun([failure], [], analysis)

    rows = [{**keys, "status": "ok", **row} for row in outcome.rows]
    timings = [
        {**keys, "stage": row["stage"], "round": row["round"], "wall_ms": wall_ms}
        for row, wall_ms in zip(outcome.rows, outcome.wall_ms)
    ]
    total = sum(row["uplink_bytes"] + row["downlink_bytes"] for row in rows)
    log.info(
        "%s %s seed %s done: %s %s=%s, %s sent",
        cell.scenario.name,
        cell.algorithm.value,
        seed,
        outcome.primary_metric,
        outcome.final_metric,
        natural_size(total),
    )
    return SeedRun(rows, timings, analysis)


def _cells(config: Union[MatrixConfig, ExperimentConfig]) -> List[ExperimentConfig]:
    if isinstance(config, MatrixConfig):
        return expand_matrix(config)
    return [config]


def run_experiment(
    config: Union[MatrixConfig, ExperimentConfig],
    output: Optional[Union[str, Path]] = None,
    workers: Optional[int] = None,
) -> ResultsTable:
    """
    Run every (cell, seed) pair and persist the results.

    Runs execute on a thread pool of ``workers`` threads, but rows are
    written in submission order, so the result files don't depend on
    which run finishes first. ``results.jsonl``, ``timings.jsonl`` and the
    shard analysis in ``analysis.jsonl`` are written through partial files
    and only replace a previous version once every run is done.
    """
    cells = _cells(config)
    if output is None:
        output = config.output
    if workers is None:
        workers = config.workers if isinstance(config, MatrixConfig) else 1
    out_dir = Path(output)
    jobs = [(cell, seed) for cell in cells for seed in cell.seeds]
    log.info(
        "Running %s cells, %s runs on %s workers into %s",
        len(cells),
        len(jobs),
        workers,
        out_dir,
    )

    rows: List[Row] = []
    with contextlib.ExitStack() as stack:
        pool = stack.enter_context(ThreadPoolExecutor(max_workers=workers))
        client_pool: Optional[Executor] = None
        if len(jobs) == 1 and workers > 1:
            # a lone run lends the workers to its clients instead
            client_pool = stack.enter_context(ThreadPoolExecutor(max_workers=workers))
        futures = [
            pool.submit(run_seed, cell, seed, client_pool) for cell, seed in jobs
        ]
        results = stack.enter_context(JsonLinesWriter(out_dir / RESULTS_FILE))
        timings = stack.enter_context(JsonLinesWriter(out_dir / TIMINGS_FILE))
        analyses = stack.enter_context(JsonLinesWriter(out_dir / ANALYSIS_FILE))
        for future in futures:
            run = future.result()
            for row in run.rows:
                results.write(row)
                rows.append(row)
            for timing in run.timings:
                timings.write(timing)
            if run.analysis is not None:
                analyses.write(run.analysis)

    table = ResultsTable.from_rows(rows)
    table.write_summary(out_dir)
    failed = sum(1 for row in rows if row["status"] != "ok")
    log.info(
        "Wrote %s rows (%s failed runs) and %s summary rows to %s",
        len(rows),
        failed,
        len(table.summary),
        out_dir,
    )
    return table


def run_sweep(
    matrix: MatrixConfig,
    output: Optional[Union[str, Path]] = None,
    workers: Optional[int] = None,
) -> List[Row]:
    """
    Robustness sweep over the perturbation ratios of ``matrix``.

    For every scenario and algorithm cell the shards are built once from
    the first seed and every ratio perturbs them afresh. Each point is the
    mean and standard error of the final primary metric over the sweep
    seeds (``perturb.seeds``, or the matrix seeds).
    """
    if matrix.perturb is None:
        raise ConfigError("A sweep needs a perturb section")
    perturb = matrix.perturb
    out_dir = Path(output if output is not None else matrix.output)
    workers = workers if workers is not None else matrix.workers
    seeds = perturb.seeds or matrix.seeds
    specs = [perturb.spec(ratio) for ratio in perturb.ratios]
    cells = expand_matrix(dataclasses.replace(matrix, perturb=None))

    rows: List[Row] = []
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for cell in cells:
            shards, num_classes = build_shards(cell, matrix.seeds[0])

            def runner_hook(
                perturbed: Sequence[ClientShard],
                seed: int,
                cell: ExperimentConfig = cell,
                num_classes: int = num_classes,
            ) -> float:
                return train_cell(cell, perturbed, num_classes, seed).final_metric

            points: List[SweepPoint] = sweep(
                shards, specs, runner_hook, seeds, executor=pool
            )
            for point in points:
                rows.append(
                    {
                        "scenario": cell.scenario.name,
                        "algorithm": cell.algorithm.value,
                        "kind": perturb.kind.value,
                        "ratio": point.ratio,
                        "mean": point.mean,
                        "stderr": point.stderr,
                        "seeds": len(point.values),
                    }
                )

    path = out_dir / SWEEP_FILE
    with atomic_writer(path) as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(_SWEEP_COLUMNS)
        for row in rows:
            writer.writerow([format_cell(row[col]) for col in _SWEEP_COLUMNS])
    log.info("Wrote %s sweep points to %s", len(rows), path)
    return rows
