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
Experiment configuration.

A configuration file is YAML validated with strictyaml against `SCHEMA`;
unknown keys are rejected. Axis fields are comma-separated lists, so one
file describes a single run as well as a whole scenario matrix::

    dataset:
      generator: sbm
      num_classes: 3
      nodes_per_class: 100
      modalities:
        text: 16
        image: 16
    scenario:
      modality: iid, noniid
      topology: available, sbm
      label: iid, louvain
      num_clients: 4
    fed:
      algorithm: fedavg, fedproto
      rounds: 20
    seeds: 0, 1, 2

`expand_matrix()` turns the parsed `MatrixConfig` into one
`ExperimentConfig` per matrix cell.
"""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Type, TypeVar, Union

from strictyaml import (
    Bool,
    CommaSeparated,
    Enum as YamlEnum,
    Float,
    Int,
    Map,
    MapPattern,
    Optional as Opt,
    Str,
    YAMLError,
    load,
)

from mmfederation import AggregatorConfig, AggregatorKind, FederationConfig
from mmnn import Architecture, Fusion, OptimizerConfig, OptimizerKind
from mmpartition import LabelMode, ModalityMode, ScenarioConfig, TopologyMode
from mmperturb import PerturbException, PerturbKind, PerturbSpec
from mmsynth import TopologyFitParams

from .errors import ConfigError, EmptyAxisError

__all__ = (
    "SCHEMA",
    "PRETRAIN_OBJECTIVES",
    "Algorithm",
    "TaskKind",
    "DatasetConfig",
    "ScenarioSection",
    "ModelConfig",
    "FedSection",
    "PretrainConfig",
    "PerturbConfig",
    "ScalingConfig",
    "MatrixConfig",
    "ExperimentConfig",
    "parse_config",
    "load_config",
    "expand_matrix",
)

_E = TypeVar("_E", bound=Enum)


class Algorithm(Enum):
    FEDAVG = "fedavg"
    FEDPROX = "fedprox"
    SCAFFOLD = "scaffold"
    FEDPROTO = "fedproto"
    ISOLATED = "isolated"

    @property
    def aggregator(self) -> AggregatorKind:
        """Aggregator kind; isolated training borrows FedAvg's server state."""
        if self is Algorithm.ISOLATED:
            return AggregatorKind.FEDAVG
        return AggregatorKind(self.value)


class TaskKind(Enum):
    NODE_CLASSIFICATION = "node_classification"
    LINK_PREDICTION = "link_prediction"
    MODALITY_MATCHING = "modality_matching"
    MODALITY_RETRIEVAL = "modality_retrieval"


PRETRAIN_OBJECTIVES = ("link_prediction", "masked_reconstruction", "contrastive")


def _values(cls: Type[_E]) -> List[str]:
    return [member.value for member in cls]  # type: ignore[attr-defined]


SCHEMA = Map(
    {
        Opt("name"): Str(),
        "dataset": Map(
            {
                Opt("generator"): YamlEnum(["sbm", "rdpg", "bundle"]),
                Opt("bundle_path"): Str(),
                Opt("num_classes"): Int(),
                Opt("nodes_per_class"): Int(),
                Opt("sbm"): Map({Opt("intra_p"): Float(), Opt("inter_p"): Float()}),
                Opt("rdpg"): Map(
                    {
                        Opt("latent_dim"): Int(),
                        Opt("scale"): Float(),
                        Opt("noise"): Float(),
                    }
                ),
                Opt("feat"): Map(
                    {
                        Opt("sigma"): Float(),
                        Opt("separation"): Float(),
                        Opt("informative_modalities"): CommaSeparated(Str()),
                    }
                ),
                Opt("modalities"): MapPattern(Str(), Int()),
            }
        ),
        Opt("scenario"): Map(
            {
                Opt("modality"): CommaSeparated(YamlEnum(_values(ModalityMode))),
                Opt("modality_beta"): Float(),
                Opt("topology"): CommaSeparated(YamlEnum(_values(TopologyMode))),
                Opt("topology_intra_p"): Float(),
                Opt("topology_inter_p"): Float(),
                Opt("topology_noise"): Float(),
                Opt("label"): CommaSeparated(YamlEnum(_values(LabelMode))),
                Opt("label_alpha"): Float(),
                Opt("num_clients"): Int(),
            }
        ),
        Opt("model"): Map(
            {
                Opt("architecture"): YamlEnum(_values(Architecture)),
                Opt("hidden"): CommaSeparated(Int()),
                Opt("fusion"): YamlEnum(_values(Fusion)),
                Opt("modalities"): CommaSeparated(Str()),
            }
        ),
        Opt("fed"): Map(
            {
                Opt("algorithm"): CommaSeparated(YamlEnum(_values(Algorithm))),
                Opt("rounds"): Int(),
                Opt("local_epochs"): Int(),
                Opt("optimizer"): YamlEnum(_values(OptimizerKind)),
                Opt("lr"): Float(),
                Opt("weight_decay"): Float(),
                Opt("mu"): Float(),
                Opt("participation"): Float(),
                Opt("proto_lambda"): Float(),
            }
        ),
        Opt("pretrain"): Map(
            {
                Opt("objective"): CommaSeparated(Str()),
                Opt("rounds"): Int(),
                Opt("finetune_epochs"): Int(),
                Opt("finetune_backbone"): Bool(),
                Opt("mask_fraction"): Float(),
                Opt("patience"): Int(),
            }
        ),
        Opt("task"): YamlEnum(_values(TaskKind)),
        Opt("metrics"): CommaSeparated(Str()),
        Opt("retrieval_k"): Int(),
        Opt("perturb"): Map(
            {
                "kind": YamlEnum(_values(PerturbKind)),
                Opt("ratios"): CommaSeparated(Float()),
                Opt("sigma"): Float(),
                Opt("target_modality"): Str(),
                Opt("seeds"): CommaSeparated(Int()),
            }
        ),
        Opt("seeds"): CommaSeparated(Int()),
        Opt("output"): Str(),
        Opt("workers"): Int(),
        Opt("scaling"): Map(
            {
                Opt("variable"): YamlEnum(["n", "m", "f"]),
                Opt("values"): CommaSeparated(Int()),
                Opt("num_nodes"): Int(),
                Opt("num_edges"): Int(),
                Opt("feature_dim"): Int(),
                Opt("repeats"): Int(),
                Opt("algorithm"): YamlEnum(_values(Algorithm)),
                Opt("num_clients"): Int(),
            }
        ),
    }
)


def _enums(cls: Type[_E], values: Any, default: Tuple[_E, ...]) -> Tuple[_E, ...]:
    if values is None:
        return default
    return tuple(cls(value) for value in values)


@dataclass(frozen=True)
class DatasetConfig:
    """
    Where the base graph comes from.

    ``generator`` is ``sbm`` (blocks of ``nodes_per_class`` nodes),
    ``rdpg`` (one-hot class latent positions scaled by ``rdpg_scale``) or
    ``bundle`` (load ``bundle_path``). Synthetic graphs get
    class-conditioned Gaussian features; only ``informative_modalities``
    (every modality by default) carry class signal.
    """

    generator: str = "sbm"
    bundle_path: Optional[str] = None
    num_classes: int = 3
    nodes_per_class: int = 40
    intra_p: float = 0.1
    inter_p: float = 0.01
    latent_dim: int = 4
    rdpg_scale: float = 0.3
    rdpg_noise: float = 0.05
    sigma: float = 1.0
    separation: float = 2.0
    informative_modalities: Optional[Tuple[str, ...]] = None
    modalities: Tuple[Tuple[str, int], ...] = (("text", 16), ("image", 16))

    def __post_init__(self) -> None:
        if self.generator == "bundle" and not self.bundle_path:
            raise ConfigError("dataset.bundle_path is required for bundle datasets")
        if self.num_classes < 1 or self.nodes_per_class < 1:
            raise ConfigError("num_classes and nodes_per_class have to be positive")
        if self.generator == "rdpg" and self.latent_dim < self.num_classes:
            raise ConfigError(
                f"rdpg.latent_dim ({self.latent_dim}) has to be at least"
                f" num_classes ({self.num_classes})"
            )
        if not self.modalities:
            raise ConfigError("A dataset needs at least one modality")
        names = {name for name, _ in self.modalities}
        unknown = set(self.informative_modalities or ()) - names
        if unknown:
            raise ConfigError(f"Unknown informative modalities: {sorted(unknown)}")

    @classmethod
    def from_data(cls, data: Mapping[str, Any]) -> DatasetConfig:
        sbm = data.get("sbm", {})
        rdpg = data.get("rdpg", {})
        feat = data.get("feat", {})
        informative = feat.get("informative_modalities")
        modalities = data.get("modalities")
        return cls(
            generator=data.get("generator", cls.generator),
            bundle_path=data.get("bundle_path"),
            num_classes=data.get("num_classes", cls.num_classes),
            nodes_per_class=data.get("nodes_per_class", cls.nodes_per_class),
            intra_p=sbm.get("intra_p", cls.intra_p),
            inter_p=sbm.get("inter_p", cls.inter_p),
            latent_dim=rdpg.get("latent_dim", cls.latent_dim),
            rdpg_scale=rdpg.get("scale", cls.rdpg_scale),
            rdpg_noise=rdpg.get("noise", cls.rdpg_noise),
            sigma=feat.get("sigma", cls.sigma),
            separation=feat.get("separation", cls.separation),
            informative_modalities=tuple(informative) if informative else None,
            modalities=(
                tuple((str(k), int(v)) for k, v in modalities.items())
                if modalities
                else cls.modalities
            ),
        )


@dataclass(frozen=True)
class ScenarioSection:
    modality: Tuple[ModalityMode, ...] = (ModalityMode.IID,)
    topology: Tuple[TopologyMode, ...] = (TopologyMode.AVAILABLE,)
    label: Tuple[LabelMode, ...] = (LabelMode.IID,)
    modality_beta: float = 1.0
    label_alpha: float = 1.0
    topology_fit: TopologyFitParams = field(default_factory=TopologyFitParams)
    num_clients: int = 4

    @classmethod
    def from_data(cls, data: Mapping[str, Any]) -> ScenarioSection:
        return cls(
            modality=_enums(ModalityMode, data.get("modality"), cls.modality),
            topology=_enums(TopologyMode, data.get("topology"), cls.topology),
            label=_enums(LabelMode, data.get("label"), cls.label),
            modality_beta=data.get("modality_beta", cls.modality_beta),
            label_alpha=data.get("label_alpha", cls.label_alpha),
            topology_fit=TopologyFitParams(
                intra_p=data.get("topology_intra_p", TopologyFitParams.intra_p),
                inter_p=data.get("topology_inter_p", TopologyFitParams.inter_p),
                rdpg_noise=data.get("topology_noise", TopologyFitParams.rdpg_noise),
            ),
            num_clients=data.get("num_clients", cls.num_clients),
        )


@dataclass(frozen=True)
class ModelConfig:
    architecture: Architecture = Architecture.MMGCN
    hidden: Tuple[int, ...] = (32,)
    fusion: Fusion = Fusion.MASKED_MEAN
    modalities: Optional[Tuple[str, ...]] = None

    @classmethod
    def from_data(cls, data: Mapping[str, Any]) -> ModelConfig:
        modalities = data.get("modalities")
        return cls(
            architecture=Architecture(data.get("architecture", "mmgcn")),
            hidden=tuple(data.get("hidden", cls.hidden)),
            fusion=Fusion(data.get("fusion", cls.fusion.value)),
            modalities=tuple(modalities) if modalities else None,
        )


@dataclass(frozen=True)
class FedSection:
    algorithms: Tuple[Algorithm, ...] = (Algorithm.FEDAVG,)
    rounds: int = 20
    local_epochs: int = 1
    optimizer: OptimizerKind = OptimizerKind.ADAM
    lr: Optional[float] = None
    weight_decay: float = 1e-5
    mu: float = 0.01
    participation: float = 1.0
    proto_lambda: float = 1.0

    def __post_init__(self) -> None:
        if self.rounds < 0:
            raise ConfigError(f"fed.rounds has to be non-negative, got {self.rounds}")

    @classmethod
    def from_data(cls, data: Mapping[str, Any]) -> FedSection:
        return cls(
            algorithms=_enums(Algorithm, data.get("algorithm"), cls.algorithms),
            rounds=data.get("rounds", cls.rounds),
            local_epochs=data.get("local_epochs", cls.local_epochs),
            optimizer=OptimizerKind(data.get("optimizer", cls.optimizer.value)),
            lr=data.get("lr"),
            weight_decay=data.get("weight_decay", cls.weight_decay),
            mu=data.get("mu", cls.mu),
            participation=data.get("participation", cls.participation),
            proto_lambda=data.get("proto_lambda", cls.proto_lambda),
        )

    def federation_config(self, algorithm: Algorithm) -> FederationConfig:
        return FederationConfig(
            aggregator=AggregatorConfig(
                kind=algorithm.aggregator,
                mu=self.mu if algorithm is Algorithm.FEDPROX else 0.0,
                proto_lambda=self.proto_lambda,
            ),
            local_epochs=self.local_epochs,
            participation=self.participation,
            optimizer=OptimizerConfig(
                kind=self.optimizer, weight_decay=self.weight_decay
            ),
            lr=self.lr,
        )


@dataclass(frozen=True)
class PretrainConfig:
    """
    Federated self-supervised pretraining followed by local fine-tuning.

    ``objective`` holds ``(name, weight)`` pairs, written ``name`` or
    ``name:weight`` in the file. An empty objective disables the stage.
    """

    objective: Tuple[Tuple[str, float], ...] = ()
    rounds: int = 0
    finetune_epochs: int = 50
    finetune_backbone: bool = False
    mask_fraction: float = 0.2
    patience: Optional[int] = None

    @property
    def enabled(self) -> bool:
        return bool(self.objective)

    @classmethod
    def from_data(cls, data: Mapping[str, Any]) -> PretrainConfig:
        objective = []
        for token in data.get("objective", ()):
            name, _, weight = token.partition(":")
            name = name.strip()
            if name not in PRETRAIN_OBJECTIVES:
                raise ConfigError(
                    f"Unknown pretraining objective {name!r},"
                    f" expected one of {', '.join(PRETRAIN_OBJECTIVES)}"
                )
            try:
                objective.append((name, float(weight) if weight else 1.0))
            except ValueError:
                raise ConfigError(f"Invalid objective weight in {token!r}") from None
        return cls(
            objective=tuple(objective),
            rounds=data.get("rounds", cls.rounds),
            finetune_epochs=data.get("finetune_epochs", cls.finetune_epochs),
            finetune_backbone=data.get("finetune_backbone", cls.finetune_backbone),
            mask_fraction=data.get("mask_fraction", cls.mask_fraction),
            patience=data.get("patience"),
        )


@dataclass(frozen=True)
class PerturbConfig:
    kind: PerturbKind
    ratios: Tuple[float, ...] = (0.0,)
    sigma: float = 1.0
    target_modality: Optional[str] = None
    seeds: Optional[Tuple[int, ...]] = None

    @classmethod
    def from_data(cls, data: Mapping[str, Any]) -> PerturbConfig:
        seeds = data.get("seeds")
        return cls(
            kind=PerturbKind(data["kind"]),
            ratios=tuple(data.get("ratios", cls.ratios)),
            sigma=data.get("sigma", cls.sigma),
            target_modality=data.get("target_modality"),
            seeds=tuple(seeds) if seeds else None,
        )

    def spec(self, ratio: float, seed: int = 0) -> PerturbSpec:
        try:
            return PerturbSpec(
                kind=self.kind,
                ratio=ratio,
                seed=seed,
                sigma=self.sigma,
                target_modality=self.target_modality,
            )
        except PerturbException as e:
            raise ConfigError(str(e)) from e


@dataclass(frozen=True)
class ScalingConfig:
    """
    Grid of a scaling measurement.

    ``variable`` is ``n`` (nodes), ``m`` (edges) or ``f`` (feature and hidden
    width); the other two stay at their fixed value.
    """

    variable: str = "f"
    values: Tuple[int, ...] = (16, 32, 64, 128)
    num_nodes: int = 1000
    num_edges: int = 5000
    feature_dim: int = 64
    repeats: int = 3
    algorithm: Algorithm = Algorithm.FEDAVG
    num_clients: int = 1

    @classmethod
    def from_data(cls, data: Mapping[str, Any]) -> ScalingConfig:
        return cls(
            variable=data.get("variable", cls.variable),
            values=tuple(data.get("values", cls.values)),
            num_nodes=data.get("num_nodes", cls.num_nodes),
            num_edges=data.get("num_edges", cls.num_edges),
            feature_dim=data.get("feature_dim", cls.feature_dim),
            repeats=data.get("repeats", cls.repeats),
            algorithm=Algorithm(data.get("algorithm", cls.algorithm.value)),
            num_clients=data.get("num_clients", cls.num_clients),
        )


@dataclass(frozen=True)
class MatrixConfig:
    """A parsed configuration file, axes still unexpanded."""

    dataset: DatasetConfig
    name: str = "experiment"
    scenario: ScenarioSection = field(default_factory=ScenarioSection)
    model: ModelConfig = field(default_factory=ModelConfig)
    fed: FedSection = field(default_factory=FedSection)
    pretrain: PretrainConfig = field(default_factory=PretrainConfig)
    task: TaskKind = TaskKind.NODE_CLASSIFICATION
    metrics: Optional[Tuple[str, ...]] = None
    retrieval_k: int = 10
    perturb: Optional[PerturbConfig] = None
    seeds: Tuple[int, ...] = (0,)
    output: str = "results"
    workers: int = 1
    scaling: Optional[ScalingConfig] = None

    def __post_init__(self) -> None:
        if not self.seeds:
            raise EmptyAxisError("seeds")
        if self.workers < 1:
            raise ConfigError(f"workers has to be at least 1, got {self.workers}")

    @classmethod
    def from_data(cls, data: Mapping[str, Any]) -> MatrixConfig:
        metrics = data.get("metrics")
        perturb = data.get("perturb")
        scaling = data.get("scaling")
        return cls(
            name=data.get("name", cls.name),
            dataset=DatasetConfig.from_data(data["dataset"]),
            scenario=ScenarioSection.from_data(data.get("scenario", {})),
            model=ModelConfig.from_data(data.get("model", {})),
            fed=FedSection.from_data(data.get("fed", {})),
            pretrain=PretrainConfig.from_data(data.get("pretrain", {})),
            task=TaskKind(data.get("task", cls.task.value)),
            metrics=tuple(metrics) if metrics else None,
            retrieval_k=data.get("retrieval_k", cls.retrieval_k),
            perturb=PerturbConfig.from_data(perturb) if perturb else None,
            seeds=tuple(data.get("seeds", cls.seeds)),
            output=data.get("output", cls.output),
            workers=data.get("workers", cls.workers),
            scaling=ScalingConfig.from_data(scaling) if scaling else None,
        )

    def with_overrides(
        self,
        *,
        output: Optional[str] = None,
        seeds: Optional[Tuple[int, ...]] = None,
        workers: Optional[int] = None,
    ) -> MatrixConfig:
        """Apply command line overrides; None keeps the file's value."""
        changes: Dict[str, Any] = {}
        if output is not None:
            changes["output"] = output
        if seeds is not None:
            changes["seeds"] = tuple(seeds)
        if workers is not None:
            changes["workers"] = workers
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class ExperimentConfig:
    """
    One cell of the experiment matrix, run once per seed.

    Attributes
    ----------
    scenario: `mmpartition.ScenarioConfig`
        Scenario of the cell. Its master seed is replaced per run.
    algorithm: `Algorithm`
        Federation algorithm, or isolated training.
    perturb: `mmperturb.PerturbSpec`, optional
        Perturbation applied to the shards. Its seed is replaced per run.
    """

    dataset: DatasetConfig
    scenario: ScenarioConfig
    model: ModelConfig
    algorithm: Algorithm
    fed: FedSection
    pretrain: PretrainConfig
    task: TaskKind
    metrics: Optional[Tuple[str, ...]]
    retrieval_k: int
    perturb: Optional[PerturbSpec]
    seeds: Tuple[int, ...]
    output: str

    @property
    def ratio(self) -> Optional[float]:
        return None if self.perturb is None else self.perturb.ratio

    @property
    def key(self) -> Tuple[str, str, Optional[float]]:
        return (self.scenario.name, self.algorithm.value, self.ratio)

    @property
    def federation_config(self) -> FederationConfig:
        return self.fed.federation_config(self.algorithm)


def parse_config(text: str, label: str = "<config>") -> MatrixConfig:
    """
    Validate ``text`` against `SCHEMA` and build a `MatrixConfig`.

    Raises
    ------
    ConfigError
        When the document doesn't match the schema or holds illegal values.
    """
    try:
        document = load(text, SCHEMA, label=label)
    except YAMLError as e:
        raise ConfigError(str(e)) from e
    try:
        return MatrixConfig.from_data(document.data)
    except (ValueError, KeyError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"{label}: {e}") from e


def load_config(path: Union[str, Path]) -> MatrixConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Can't read config file {path}: {e}") from e
    return parse_config(text, label=str(path))


def expand_matrix(matrix: MatrixConfig) -> List[ExperimentConfig]:
    """
    Cartesian product over the scenario axes, the algorithms and the
    perturbation ratios, in that nesting order.

    Seeds are not an axis: every cell keeps the full seed list.

    Raises
    ------
    EmptyAxisError
        When an axis holds no value.
    """
    section = matrix.scenario
    ratios: Tuple[Optional[float], ...] = (None,)
    if matrix.perturb is not None:
        ratios = matrix.perturb.ratios
    axes: Dict[str, Tuple[Any, ...]] = {
        "scenario.modality": section.modality,
        "scenario.topology": section.topology,
        "scenario.label": section.label,
        "fed.algorithm": matrix.fed.algorithms,
        "perturb.ratios": ratios,
    }
    for axis, values in axes.items():
        if not values:
            raise EmptyAxisError(axis)

    cells = []
    for modality, topology, label, algorithm, ratio in itertools.product(
        *axes.values()
    ):
        try:
            scenario = ScenarioConfig(
                modality=modality,
                topology=topology,
                label=label,
                num_clients=section.num_clients,
                modality_beta=section.modality_beta,
                label_alpha=section.label_alpha,
                topology_fit=section.topology_fit,
            )
        except ValueError as e:
            raise ConfigError(str(e)) from e
        perturb = None
        if matrix.perturb is not None and ratio is not None:
            perturb = matrix.perturb.spec(ratio)
        cells.append(
            ExperimentConfig(
                dataset=matrix.dataset,
                scenario=scenario,
                model=matrix.model,
                algorithm=algorithm,
                fed=matrix.fed,
                pretrain=matrix.pretrain,
                task=matrix.task,
                metrics=matrix.metrics,
                retrieval_k=matrix.retrieval_k,
                perturb=perturb,
                seeds=matrix.seeds,
                output=matrix.output,
            )
        )
    return cells
