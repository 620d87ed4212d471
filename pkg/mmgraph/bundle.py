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
Portable on-disk graph bundle.

A bundle is a directory with::

    meta.json           counts, modality descriptors, class count, endianness tag
    edges.tsv           "u<TAB>v" per line, u < v, sorted
    labels.tsv          "node<TAB>label" per labeled node
    feat_<name>.f32     row-major little-endian float32 matrix
    mask_<name>.bits    availability bitset, packed LSB-first
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np

from .errors import (
    BundleDimensionMismatch,
    BundleFileMissing,
    BundleFormatError,
    BundleTruncated,
)
from .graph import UNLABELED, Modality, MultimodalGraph, canonicalize
from .log import log

__all__ = ("BUNDLE_FORMAT", "BUNDLE_VERSION", "save_bundle", "load_bundle")

BUNDLE_FORMAT = "mmfgl-graph-bundle"
BUNDLE_VERSION = 1

_FLOAT = np.dtype("<f4")


def save_bundle(graph: MultimodalGraph, dir_path: Union[str, Path]) -> None:
    path = Path(dir_path)
    path.mkdir(parents=True, exist_ok=True)

    meta: Dict[str, Any] = {
        "format": BUNDLE_FORMAT,
        "version": BUNDLE_VERSION,
        "num_nodes": graph.num_nodes,
        "num_edges": graph.num_edges,
        "num_classes": graph.num_classes,
        "labeled": graph.is_labeled,
        "modalities": [
            {"name": m.name, "feature_dim": m.feature_dim} for m in graph.modalities
        ],
        "endianness": "little",
    }
    (path / "meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    (path / "edges.tsv").write_text(
        "".join(f"{u}\t{v}\n" for u, v in graph.edges.tolist()), encoding="utf-8"
    )

    label_lines: List[str] = []
    if graph.labels is not None:
        for node, label in enumerate(graph.labels.tolist()):
            if label != UNLABELED:
                label_lines.append(f"{node}\t{label}\n")
    (path / "labels.tsv").write_text("".join(label_lines), encoding="utf-8")

    mask = graph.modality_mask
    assert mask is not None, "mypy"
    for idx, modality in enumerate(graph.modalities):
        matrix = graph.features[modality.name]
        (path / f"feat_{modality.name}.f32").write_bytes(
            np.ascontiguousarray(matrix, dtype=_FLOAT).tobytes()
        )
        (path / f"mask_{modality.name}.bits").write_bytes(
            np.packbits(mask[:, idx], bitorder="little").tobytes()
        )
    log.debug(
        "Saved bundle with %s nodes and %s edges to %s",
        graph.num_nodes,
        graph.num_edges,
        path,
    )


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise BundleFileMissing(path) from None


def _read_bytes(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except FileNotFoundError:
        raise BundleFileMissing(path) from None


def _read_meta(path: Path) -> Dict[str, Any]:
    meta_path = path / "meta.json"
    try:
        meta = json.loads(_read_text(meta_path))
    except json.JSONDecodeError as e:
        raise BundleFormatError(meta_path, f"meta.json is not valid JSON: {e}") from e
    if not isinstance(meta, dict) or meta.get("format") != BUNDLE_FORMAT:
        raise BundleFormatError(meta_path, "Not a graph bundle")
    if meta.get("endianness") != "little":
        raise BundleFormatError(
            meta_path, f"Unsupported endianness tag: {meta.get('endianness')!r}"
        )
    return meta


def _parse_pairs(path: Path, columns: int = 2) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(_read_text(path).splitlines(), 1):
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != columns:
            raise BundleFormatError(path, f"Line {lineno} should have {columns} fields")
        try:
            rows.append([int(part) for part in parts])
        except ValueError:
            raise BundleFormatError(
                path, f"Line {lineno} holds a non-integer"
            ) from None
    return np.array(rows, dtype=np.int64).reshape(-1, columns)


def _read_matrix(path: Path, num_nodes: int, dim: int) -> np.ndarray:
    data = _read_bytes(path)
    expected = num_nodes * dim * _FLOAT.itemsize
    if len(data) != expected:
        row_bytes = num_nodes * _FLOAT.itemsize
        if row_bytes and len(data) % row_bytes == 0:
            raise BundleDimensionMismatch(
                path, expected_dim=dim, actual_dim=len(data) // row_bytes
            )
        if len(data) < expected:
            raise BundleTruncated(path, expected_bytes=expected, actual_bytes=len(data))
        raise BundleFormatError(
            path, f"payload has {len(data)} bytes, expected {expected}"
        )
    return np.frombuffer(data, dtype=_FLOAT).reshape(num_nodes, dim).astype(np.float32)


def _read_mask(path: Path, num_nodes: int) -> np.ndarray:
    data = _read_bytes(path)
    expected = (num_nodes + 7) // 8
    if len(data) < expected:
        raise BundleTruncated(path, expected_bytes=expected, actual_bytes=len(data))
    if len(data) > expected:
        raise BundleFormatError(
            path, f"bitset has {len(data)} bytes, expected {expected}"
        )
    bits = np.unpackbits(
        np.frombuffer(data, dtype=np.uint8), count=num_nodes, bitorder="little"
    )
    return bits.astype(bool)


def load_bundle(dir_path: Union[str, Path]) -> MultimodalGraph:
    """
    Load a graph saved with `save_bundle()`.

    Raises
    ------
    BundleFileMissing
        When a file required by the layout doesn't exist.
    BundleDimensionMismatch
        When a feature payload holds a different number of columns
        than meta.json declares.
    BundleTruncated
        When a binary payload is cut short.
    BundleFormatError
        When meta.json or a text table can't be parsed.
    """
    path = Path(dir_path)
    meta = _read_meta(path)
    try:
        num_nodes = int(meta["num_nodes"])
        num_classes = int(meta["num_classes"])
        labeled = bool(meta["labeled"])
        modalities = tuple(
            Modality(str(entry["name"]), int(entry["feature_dim"]))
            for entry in meta["modalities"]
        )
    except (KeyError, TypeError, ValueError) as e:
        raise BundleFormatError(path / "meta.json", f"Invalid meta.json: {e}") from e

    edges = _parse_pairs(path / "edges.tsv")
    if edges.shape[0] != int(meta.get("num_edges", edges.shape[0])):
        raise BundleFormatError(
            path / "edges.tsv",
            f"meta.json declares {meta['num_edges']} edges,"
            f" edges.tsv has {edges.shape[0]}",
        )

    labels = None
    if labeled:
        labels = np.full(num_nodes, UNLABELED, dtype=np.int64)
        label_rows = _parse_pairs(path / "labels.tsv")
        if label_rows.size:
            nodes = label_rows[:, 0]
            if nodes.min() < 0 or nodes.max() >= num_nodes:
                raise BundleFormatError(
                    path / "labels.tsv", "Label row references a missing node"
                )
            labels[nodes] = label_rows[:, 1]

    features = {}
    mask = np.ones((num_nodes, len(modalities)), dtype=bool)
    for idx, modality in enumerate(modalities):
        features[modality.name] = _read_matrix(
            path / f"feat_{modality.name}.f32", num_nodes, modality.feature_dim
        )
        mask[:, idx] = _read_mask(path / f"mask_{modality.name}.bits", num_nodes)

    return canonicalize(
        MultimodalGraph(
            num_nodes=num_nodes,
            edges=edges,
            modalities=modalities,
            features=features,
            modality_mask=mask,
            labels=labels,
            num_classes=num_classes,
        )
    )
