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
Seeding helpers shared by every stochastic stage.

All randomness goes through `make_rng()`, which wraps numpy's counter-based
Philox bit generator. Stages never share a generator; instead each one gets
its own seed from `derive_seed()`, so adding a draw to one stage never shifts
the stream of another.
"""

import hashlib
import math
from typing import Union

import numpy as np

__all__ = ("derive_seed", "make_rng", "round_half_up")

_SEED_MASK = (1 << 64) - 1


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed & _SEED_MASK))


def derive_seed(master_seed: int, *keys: Union[str, int]) -> int:
    """
    Derive a 64-bit stage seed from a master seed and a path of stage keys.

    The result only depends on the values passed, never on call order.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(str(master_seed & _SEED_MASK).encode())
    for key in keys:
        # unit separator keeps ("ab", "c") and ("a", "bc") apart
        h.update(b"\x1f")
        h.update(str(key).encode())
    return int.from_bytes(h.digest(), "little")


def round_half_up(value: float) -> int:
    # python's round() is banker's rounding, counts here round .5 up
    return int(math.floor(value + 0.5))
