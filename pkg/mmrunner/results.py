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
Results tables and their files.

``results.jsonl`` holds one JSON object per (cell, seed, round), or one
failure row per failed seed. ``summary.csv`` holds one row per
(scenario, algorithm, ratio) cell. Neither file holds timings, so a rerun
with the same configuration reproduces them byte for byte; wall-clock
times go to ``timings.jsonl``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from mmmetrics import convergence_round

from .errors import ResultsError, UnknownColumnError
from .log import log
from .utils import atomic_writer

__all__ = (
    "RESULTS_FILE",
    "SUMMARY_FILE",
    "TIMINGS_FILE",
    "PLOT_COLUMNS",
    "JsonLinesWriter",
    "ResultsTable",
    "PlotSpec",
    "summarize",
    "emit_plotdata",
    "format_cell",
)

RESULTS_FILE = "results.jsonl"
SUMMARY_FILE = "summary.csv"
TIMINGS_FILE = "timings.jsonl"

PLOT_COLUMNS = ("x", "series", "mean", "std")

_SUMMARY_HEAD = (
    "scenario",
    "algorithm",
    "ratio",
    "seeds",
    "failed",
    "rounds",
    "primary_metric",
    "convergence_round",
    "uplink_bytes",
    "downlink_bytes",
)
_PRIMARY_ORDER = ("accuracy", "auc", "mrr", "recon_mse")

Row = Dict[str, Any]


def _lower_is_better(metric: str) -> bool:
    return metric.endswith("mse") or metric.endswith("loss")


def format_cell(value: Any) -> str:
    """CSV text of a value; floats use repr so parsing them back is exact."""
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


class JsonLinesWriter:
    """
    Append-only JSON-lines writer that only replaces the target on commit.

    Rows go to ``<name>.partial`` as they arrive. `commit()` renames the
    partial file over the target; leaving the block with an exception keeps
    the previous target intact.
    """

    def __init__(self, path: Union[str, Path]) -> None:
        self.path = Path(path)
        self._context = atomic_writer(self.path)
        self._fp: Optional[IO[str]] = None

    def __enter__(self) -> JsonLinesWriter:
        self._fp = self._context.__enter__()
        return self

    def write(self, row: Row) -> None:
        assert self._fp is not None, "writer is not open"
        self._fp.write(json.dumps(row, sort_keys=True) + "\n")
        self._fp.flush()

    def __exit__(self, *exc_info: Any) -> None:
        self._context.__exit__(*exc_info)


def _group_key(row: Row) -> Tuple[str, str, Optional[float]]:
    return (row["scenario"], row["algorithm"], row.get("ratio"))


def _primary(metrics: Iterable[str]) -> Optional[str]:
    names = sorted(metrics)
    for name in _PRIMARY_ORDER:
        if name in names:
            return name
    return names[0] if names else None


def summarize(rows: Sequence[Row]) -> List[Row]:
    """
    One summary row per (scenario, algorithm, ratio), in first-seen order.

    For every metric the row holds the mean and standard deviation over
    seeds of the final-round value (``<metric>_mean``, ``<metric>_std``) and
    the mean of each seed's best round (``<metric>_best_mean``). The
    convergence round is computed on the seed-averaged curve of the primary
    metric. Byte columns are mean bytes per round.
    """
    groups: Dict[Tuple[str, str, Optional[float]], List[Row]] = {}
    for row in rows:
        groups.setdefault(_group_key(row), []).append(row)

    summary = []
    for (scenario, algorithm, ratio), group in groups.items():
        ok = [row for row in group if row.get("status") == "ok"]
        failed_seeds = {row["seed"] for row in group if row.get("status") != "ok"}
        by_seed: Dict[int, List[Row]] = {}
        for row in ok:
            by_seed.setdefault(row["seed"], []).append(row)
        out: Row = {
            "scenario": scenario,
            "algorithm": algorithm,
            "ratio": ratio,
            "seeds": len(by_seed),
            "failed": len(failed_seeds),
            "rounds": max((row["round"] for row in ok), default=0),
        }
        metrics = sorted({name for row in ok for name in row["metrics"]})
        primary = _primary(metrics)
        out["primary_metric"] = primary
        out["convergence_round"] = None
        if primary is not None and by_seed:
            curves = [
                [r["metrics"][primary] for r in runs if primary in r["metrics"]]
                for runs in by_seed.values()
            ]
            length = min(len(curve) for curve in curves)
            if length:
                mean_curve = np.mean([curve[:length] for curve in curves], axis=0)
                if _lower_is_better(primary):
                    # improvement over the worst round keeps the curve non-negative
                    mean_curve = mean_curve.max() - mean_curve
                out["convergence_round"] = convergence_round(mean_curve.tolist())
        for direction in ("uplink_bytes", "downlink_bytes"):
            out[direction] = float(np.mean([r[direction] for r in ok])) if ok else None
        for metric in metrics:
            finals = []
            bests = []
            for runs in by_seed.values():
                values = [r["metrics"][metric] for r in runs if metric in r["metrics"]]
                if not values:
                    continue
                finals.append(values[-1])
                bests.append(min(values) if _lower_is_better(metric) else max(values))
            out[f"{metric}_mean"] = float(np.mean(finals)) if finals else None
            out[f"{metric}_std"] = float(np.std(finals)) if finals else None
            out[f"{metric}_best_mean"] = float(np.mean(bests)) if bests else None
        summary.append(out)
    return summary


def _summary_columns(summary: Sequence[Row]) -> List[str]:
    extra = sorted({key for row in summary for key in row} - set(_SUMMARY_HEAD))
    return list(_SUMMARY_HEAD) + extra


@dataclass(frozen=True)
class ResultsTable:
    """Raw rows of an experiment plus their per-cell summary."""

    rows: Tuple[Row, ...]
    summary: Tuple[Row, ...]

    @classmethod
    def from_rows(cls, rows: Iterable[Row]) -> ResultsTable:
        rows = tuple(rows)
        return cls(rows, tuple(summarize(rows)))

    @property
    def ok_rows(self) -> List[Row]:
        return [row for row in self.rows if row.get("status") == "ok"]

    def columns(self) -> List[str]:
        names = set()
        for row in self.ok_rows:
            names.update(key for key in row if key != "metrics")
            names.update(row["metrics"])
        return sorted(names)

    def write_summary(self, out_dir: Union[str, Path]) -> Path:
        path = Path(out_dir) / SUMMARY_FILE
        columns = _summary_columns(self.summary)
        with atomic_writer(path) as fp:
            writer = csv.writer(fp, lineterminator="\n")
            writer.writerow(columns)
            for row in self.summary:
                writer.writerow([format_cell(row.get(col)) for col in columns])
        return path

    def write(self, out_dir: Union[str, Path]) -> None:
        """Write ``results.jsonl`` and ``summary.csv`` into ``out_dir``."""
        with JsonLinesWriter(Path(out_dir) / RESULTS_FILE) as writer:
            for row in self.rows:
                writer.write(row)
        self.write_summary(out_dir)

    @classmethod
    def load(cls, out_dir: Union[str, Path]) -> ResultsTable:
        """Read ``results.jsonl`` back and recompute the summary."""
        path = Path(out_dir) / RESULTS_FILE
        try:
            lines = path.read_text(encoding="utf-8").splitlines()
        except FileNotFoundError:
            raise ResultsError(f"No {RESULTS_FILE} in {out_dir}") from None
        rows = []
        for lineno, line in enumerate(lines, 1):
            if not line.strip():
                continue
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError as e:
                raise ResultsError(f"{path}:{lineno}: {e}") from e
        return cls.from_rows(rows)


@dataclass(frozen=True)
class PlotSpec:
    """
    A figure's data series.

    ``x`` and ``y`` name a row field (``round``, ``ratio``, ``seed``, byte
    counts...) or a metric. With ``x == "round"`` every round is a point,
    otherwise only the final round of each run counts.
    """

    x: str
    y: str
    series: Optional[str] = "algorithm"


def _value(row: Row, column: str) -> Any:
    if column in row and column != "metrics":
        return row[column]
    return row["metrics"].get(column)


def emit_plotdata(
    table: ResultsTable, spec: PlotSpec, path: Union[str, Path]
) -> List[Row]:
    """
    Write a tidy ``x, series, mean, std`` CSV for ``spec``.

    Raises
    ------
    ResultsError
        When the table has no successful row.
    UnknownColumnError
        When ``spec`` names a column the table doesn't have.
    """
    rows = table.ok_rows
    if not rows:
        raise ResultsError("Results table has no successful rows")
    available = table.columns()
    for column in (spec.x, spec.y, spec.series):
        if column is not None and column not in available:
            raise UnknownColumnError(column, available)

    if spec.x != "round":
        finals: Dict[Tuple[Any, ...], Row] = {}
        for row in rows:
            run = (*_group_key(row), row["seed"])
            if run not in finals or row["round"] >= finals[run]["round"]:
                finals[run] = row
        rows = list(finals.values())

    points: Dict[Tuple[Any, Any], List[float]] = {}
    for row in rows:
        y = _value(row, spec.y)
        if y is None:
            continue
        series = _value(row, spec.series) if spec.series is not None else ""
        points.setdefault((_value(row, spec.x), series), []).append(float(y))

    keys = list(points)
    if all(isinstance(x, (int, float)) for x, _ in keys):
        keys.sort(key=lambda key: (key[0], str(key[1])))
    plot_rows = []
    for key in keys:
        values = points[key]
        plot_rows.append(
            {
                "x": key[0],
                "series": key[1],
                "mean": float(np.mean(values)),
                "std": float(np.std(values)),
            }
        )
    with atomic_writer(path) as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(PLOT_COLUMNS)
        for row in plot_rows:
            writer.writerow([format_cell(row[col]) for col in PLOT_COLUMNS])
    log.info("Wrote %s plot points to %s", len(plot_rows), path)
    return plot_rows
