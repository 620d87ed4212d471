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

"""Experiment configuration, execution, results and scaling measurements."""

from .analysis import ANALYSIS_FILE, KL_BINS, analyze_shards
from .config import (
    PRETRAIN_OBJECTIVES,
    SCHEMA,
    Algorithm,
    DatasetConfig,
    ExperimentConfig,
    FedSection,
    MatrixConfig,
    ModelConfig,
    PerturbConfig,
    PretrainConfig,
    ScalingConfig,
    ScenarioSection,
    TaskKind,
    expand_matrix,
    load_config,
    parse_config,
)
from .datasets import build_base_graph, clear_cache, load_base_graph, select_modalities
from .errors import (
    ConfigError,
    EmptyAxisError,
    InvalidCostModel,
    ResultsError,
    RunnerException,
    ScalingGridError,
    UnknownColumnError,
)
from .experiment import (
    SWEEP_FILE,
    SeedRun,
    TrainOutcome,
    build_shards,
    make_pretrain_task,
    make_spec,
    make_task,
    run_experiment,
    run_seed,
    run_sweep,
    train_cell,
)
from .results import (
    PLOT_COLUMNS,
    RESULTS_FILE,
    SUMMARY_FILE,
    TIMINGS_FILE,
    JsonLinesWriter,
    PlotSpec,
    ResultsTable,
    emit_plotdata,
    format_cell,
    summarize,
)
from .scaling import (
    CostModel,
    ScalingFit,
    ScalingResult,
    fit_scaling,
    measure_scaling,
    random_graph,
)
from .utils import atomic_writer, natural_size

__all__ = (
    "ANALYSIS_FILE",
    "Algorithm",
    "ConfigError",
    "CostModel",
    "DatasetConfig",
    "EmptyAxisError",
    "ExperimentConfig",
    "FedSection",
    "InvalidCostModel",
    "JsonLinesWriter",
    "KL_BINS",
    "MatrixConfig",
    "ModelConfig",
    "PLOT_COLUMNS",
    "PRETRAIN_OBJECTIVES",
    "PerturbConfig",
    "PlotSpec",
    "PretrainConfig",
    "RESULTS_FILE",
    "ResultsError",
    "ResultsTable",
    "RunnerException",
    "SCHEMA",
    "SUMMARY_FILE",
    "SWEEP_FILE",
    "ScalingConfig",
    "ScalingFit",
    "ScalingGridError",
    "ScalingResult",
    "ScenarioSection",
    "SeedRun",
    "TIMINGS_FILE",
    "TaskKind",
    "TrainOutcome",
    "UnknownColumnError",
    "analyze_shards",
    "atomic_writer",
    "build_base_graph",
    "build_shards",
    "clear_cache",
    "emit_plotdata",
    "expand_matrix",
    "fit_scaling",
    "format_cell",
    "load_base_graph",
    "load_config",
    "make_pretrain_task",
    "make_spec",
    "make_task",
    "measure_scaling",
    "natural_size",
    "parse_config",
    "random_graph",
    "run_experiment",
    "run_seed",
    "run_sweep",
    "select_modalities",
    "summarize",
    "train_cell",
)
