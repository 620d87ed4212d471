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
Wire format of federated payloads.

A parameter payload is an 8-byte little-endian segment count followed by
the flat parameter array as little-endian float32. A prototype payload is
the ``(C, h)`` prototype matrix as float32 followed by ``C`` int64 class
counts. Byte telemetry is the length of these encodings.
"""

from typing import Tuple

import numpy as np

from mmnn import ParamLayout, ParamVector

from .errors import PayloadError

__all__ = (
    "HEADER_BYTES",
    "encode_params",
    "decode_params",
    "param_payload_size",
    "encode_prototypes",
    "decode_prototypes",
    "prototype_payload_size",
)

HEADER_BYTES = 8

_FLOAT = np.dtype("<f4")
_COUNT = np.dtype("<i8")
_HEADER = np.dtype("<u8")


def param_payload_size(layout: ParamLayout) -> int:
    return HEADER_BYTES + _FLOAT.itemsize * layout.size


def encode_params(params: ParamVector) -> bytes:
    header = np.array([len(params.layout)], dtype=_HEADER).tobytes()
    return header + np.ascontiguousarray(params.values, dtype=_FLOAT).tobytes()


def decode_params(layout: ParamLayout, payload: bytes) -> ParamVector:
    if len(payload) != param_payload_size(layout):
        raise PayloadError(
            f"Parameter payload has {len(payload)} bytes,"
            f" expected {param_payload_size(layout)}"
        )
    (segments,) = np.frombuffer(payload[:HEADER_BYTES], dtype=_HEADER)
    if int(segments) != len(layout):
        raise PayloadError(
            f"Payload declares {int(segments)} segments, layout has {len(layout)}"
        )
    values = np.frombuffer(payload[HEADER_BYTES:], dtype=_FLOAT).astype(np.float32)
    return ParamVector(layout, values)


def prototype_payload_size(num_classes: int, dim: int) -> int:
    return _FLOAT.itemsize * num_classes * dim + _COUNT.itemsize * num_classes


def encode_prototypes(prototypes: np.ndarray, counts: np.ndarray) -> bytes:
    return (
        np.ascontiguousarray(prototypes, dtype=_FLOAT).tobytes()
        + np.ascontiguousarray(counts, dtype=_COUNT).tobytes()
    )


def decode_prototypes(
    payload: bytes, num_classes: int, dim: int
) -> Tuple[np.ndarray, np.ndarray]:
    if len(payload) != prototype_payload_size(num_classes, dim):
        raise PayloadError(
            f"Prototype payload has {len(payload)} bytes,"
            f" expected {prototype_payload_size(num_classes, dim)}"
        )
    split = _FLOAT.itemsize * num_classes * dim
    prototypes = np.frombuffer(payload[:split], dtype=_FLOAT).reshape(num_classes, dim)
    counts = np.frombuffer(payload[split:], dtype=_COUNT)
    return prototypes.astype(np.float32), counts.astype(np.int64)
