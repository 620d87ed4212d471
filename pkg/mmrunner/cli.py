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
Command line interface.

Usage::

    python -m mmrunner run --config experiment.yaml --out results/ --seeds 0,1,2
    python -m mmrunner plotdata --results results/ --x round --y accuracy

Every subcommand except ``plotdata`` reads a configuration file; ``--out``,
``--seeds`` and ``--workers`` override the file's values.
"""

import argparse
import dataclasses
import json
import logging
import re
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from mmgraph import MMGraphException, derive_seed, save_bundle
from mmmetrics import MetricsException
from mmpartition import PartitionException, build_scenario, save_partition
from mmperturb import PerturbException
from mmsynth import SynthException

from .analysis import ANALYSIS_FILE, analyze_shards
from .config import MatrixConfig, ScalingConfig, expand_matrix, load_config
from .datasets import load_base_graph
from .errors import RunnerException
from .experiment import run_experiment, run_sweep
from .log import log
from .results import JsonLinesWriter, PlotSpec, ResultsTable, emit_plotdata
from .scaling import measure_scaling
from .utils import atomic_writer

__all__ = ("build_parser", "main", "entry_point")

SCALING_FILE = "scaling.json"
_LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)
_USER_ERRORS = (
    RunnerException,
    MMGraphException,
    SynthException,
    PartitionException,
    PerturbException,
    MetricsException,
)


def _seed_list(value: str) -> Tuple[int, ...]:
    try:
        seeds = tuple(int(part) for part in value.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed list: {value!r}") from None
    if not seeds:
        raise argparse.ArgumentTypeError("seed list can't be empty")
    return seeds


def _positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        number = 0
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value!r}")
    return number


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmrunner",
        description="Multimodal federated graph learning experiments.",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="increase logging verbosity (-v info, -vv debug)",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def add_command(name: str, help_text: str) -> argparse.ArgumentParser:
        command = commands.add_parser(name, help=help_text)
        command.add_argument("--config", required=True, type=Path)
        command.add_argument("--out", type=Path, default=None)
        command.add_argument("--seeds", type=_seed_list, default=None)
        command.add_argument("--workers", type=_positive_int, default=None)
        return command

    add_command("gen", "generate (or load) the base graph and save it as a bundle")
    add_command("partition", "partition the base graph and save the client shards")
    add_command("run", "run every cell of the experiment matrix")
    add_command("sweep", "run a perturbation sweep, or the matrix without one")
    add_command("scaling", "measure empirical scaling exponents")

    plot = commands.add_parser("plotdata", help="write tidy plot data from results")
    plot.add_argument("--results", required=True, type=Path)
    plot.add_argument("--x", required=True)
    plot.add_argument("--y", required=True)
    plot.add_argument("--series", default="algorithm")
    plot.add_argument("--out", type=Path, default=None)
    return parser


def _matrix(args: argparse.Namespace) -> MatrixConfig:
    matrix = load_config(args.config)
    return matrix.with_overrides(
        output=str(args.out) if args.out is not None else None,
        seeds=args.seeds,
        workers=args.workers,
    )


def _dir_name(scenario_name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.=-]+", "_", scenario_name).strip("_")


def _gen(matrix: MatrixConfig) -> None:
    out_dir = Path(matrix.output)
    for seed in matrix.seeds:
        graph = load_base_graph(matrix.dataset, derive_seed(seed, "dataset"))
        target = out_dir if len(matrix.seeds) == 1 else out_dir / f"seed-{seed}"
        save_bundle(graph, target)
        log.info("Saved %s-node graph to %s", graph.num_nodes, target)


def _partition(matrix: MatrixConfig) -> None:
    out_dir = Path(matrix.output)
    seen = set()
    with JsonLinesWriter(out_dir / ANALYSIS_FILE) as analyses:
        for cell in expand_matrix(matrix):
            if cell.scenario.name in seen:
                continue
            seen.add(cell.scenario.name)
            for seed in matrix.seeds:
                graph = load_base_graph(matrix.dataset, derive_seed(seed, "dataset"))
                scenario = dataclasses.replace(
                    cell.scenario, master_seed=derive_seed(seed, "scenario")
                )
                result = build_scenario(graph, scenario)
                target = out_dir / _dir_name(scenario.name) / f"seed-{seed}"
                save_partition(result, target)
                log.info("Saved %s shards to %s", len(result.shards), target)
                report = analyze_shards(result.shards)
                keys = {"scenario": scenario.name, "seed": seed}
                analyses.write({**keys, **report.flat()})


def _scaling(matrix: MatrixConfig) -> None:
    config = matrix.scaling if matrix.scaling is not None else ScalingConfig()
    result = measure_scaling(config, matrix.seeds[0])
    path = Path(matrix.output) / SCALING_FILE
    with atomic_writer(path) as fp:
        json.dump(result.to_dict(), fp, indent=2, sort_keys=True)
        fp.write("\n")
    print(
        f"{result.variable}: slope {result.fit.slope:.3f}"
        f" ({result.fit.ci_low:.3f}, {result.fit.ci_high:.3f})"
    )


def _plotdata(args: argparse.Namespace) -> None:
    table = ResultsTable.load(args.results)
    series = args.series or None
    spec = PlotSpec(x=args.x, y=args.y, series=series)
    out = args.out
    if out is None:
        out = args.results / f"plot_{args.y}_by_{args.x}.csv"
    emit_plotdata(table, spec, out)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = _LOG_LEVELS[min(args.verbose, len(_LOG_LEVELS) - 1)]
    logging.basicConfig(
        level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )
    try:
        if args.command == "plotdata":
            _plotdata(args)
            return 0
        matrix = _matrix(args)
        if args.command == "gen":
            _gen(matrix)
        elif args.command == "partition":
            _partition(matrix)
        elif args.command == "run":
            table = run_experiment(matrix)
            return 1 if any(r["status"] != "ok" for r in table.rows) else 0
        elif args.command == "sweep":
            if matrix.perturb is not None:
                run_sweep(matrix)
            else:
                run_experiment(matrix)
        else:
            _scaling(matrix)
    except _USER_ERRORS as e:
        log.error("%s", e)
        return 2
    return 0


def entry_point(argv: Optional[List[str]] = None) -> None:
    sys.exit(main(argv))
