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
Persistence of partitioned scenarios.

Layout::

    partition.json      client count, node count, provenance, axis report
    assignment.tsv      "node<TAB>client" per global node
    splits.tsv          "client<TAB>local<TAB>global<TAB>split" per client node
    client_<k>/         graph bundle of client k
"""

import json
from pathlib import Path
from typing import Dict, List, Union

import numpy as np

from mmgraph import ClientShard, Provenance, SplitMasks, load_bundle, save_bundle

from .errors import PartitionStorageError
from .log import log
from .result import AxisReport, PartitionResult

__all__ = ("save_partition", "load_partition")

_SPLIT_NAMES = ("train", "val", "test")


def _client_dir(path: Path, client_id: int) -> Path:
    return path / f"client_{client_id:03d}"


def save_partition(result: PartitionResult, dir_path: Union[str, Path]) -> None:
    path = Path(dir_path)
    path.mkdir(parents=True, exist_ok=True)
    shards = result.shards
    provenance = shards[0].provenance if shards else Provenance("", 0)
    meta = {
        "num_clients": len(shards),
        "num_nodes": int(result.assignment.shape[0]),
        "scenario_hash": provenance.scenario_hash,
        "partition_seed": provenance.partition_seed,
        "axis_report": result.axis_report.to_dict(),
    }
    (path / "partition.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    clients = result.assignment.tolist()
    (path / "assignment.tsv").write_text(
        "".join(f"{node}\t{client}\n" for node, client in enumerate(clients)),
        encoding="utf-8",
    )
    lines: List[str] = []
    for shard in shards:
        split_of = np.full(shard.num_nodes, "none", dtype=object)
        for name, mask in zip(_SPLIT_NAMES, shard.splits):
            split_of[mask] = name
        for local, global_id in enumerate(shard.node_global_ids.tolist()):
            lines.append(
                f"{shard.client_id}\t{local}\t{global_id}\t{split_of[local]}\n"
            )
        save_bundle(shard.graph, _client_dir(path, shard.client_id))
    (path / "splits.tsv").write_text("".join(lines), encoding="utf-8")
    log.info("Saved %s client shards to %s", len(shards), path)


def load_partition(dir_path: Union[str, Path]) -> PartitionResult:
    """
    Load a partition saved with `save_partition()`.

    Raises
    ------
    PartitionStorageError
        When partition.json or one of the tables is missing or inconsistent.
    mmgraph.BundleError
        When a client bundle can't be read.
    """
    path = Path(dir_path)
    try:
        meta = json.loads((path / "partition.json").read_text(encoding="utf-8"))
        assignment_text = (path / "assignment.tsv").read_text(encoding="utf-8")
        splits_text = (path / "splits.tsv").read_text(encoding="utf-8")
    except FileNotFoundError as e:
        raise PartitionStorageError(f"Incomplete partition directory: {e}") from e
    except json.JSONDecodeError as e:
        raise PartitionStorageError(f"partition.json is not valid JSON: {e}") from e

    num_nodes = int(meta["num_nodes"])
    assignment = np.full(num_nodes, -1, dtype=np.int64)
    for line in assignment_text.splitlines():
        node, client = (int(part) for part in line.split("\t"))
        assignment[node] = client
    if (assignment < 0).any():
        raise PartitionStorageError("assignment.tsv doesn't cover every node")

    rows: Dict[int, List[List[str]]] = {}
    for line in splits_text.splitlines():
        parts = line.split("\t")
        if len(parts) != 4:
            raise PartitionStorageError(f"Malformed splits.tsv line: {line!r}")
        rows.setdefault(int(parts[0]), []).append(parts)

    provenance = Provenance(str(meta["scenario_hash"]), int(meta["partition_seed"]))
    shards = []
    for client_id in range(int(meta["num_clients"])):
        graph = load_bundle(_client_dir(path, client_id))
        client_rows = sorted(rows.get(client_id, []), key=lambda parts: int(parts[1]))
        if len(client_rows) != graph.num_nodes:
            raise PartitionStorageError(
                f"splits.tsv lists {len(client_rows)} nodes for client {client_id},"
                f" its bundle has {graph.num_nodes}"
            )
        ids = np.array([int(parts[2]) for parts in client_rows], dtype=np.int64)
        names = np.array([parts[3] for parts in client_rows], dtype=object)
        splits = SplitMasks(*(names == name for name in _SPLIT_NAMES))
        shards.append(ClientShard(client_id, ids, graph, splits, provenance))
    assignment.setflags(write=False)
    return PartitionResult(
        tuple(shards), assignment, AxisReport.from_dict(meta["axis_report"])
    )
