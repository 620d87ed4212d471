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

from typing import Callable, Tuple, Union

import numpy as np

from mmgraph import make_rng, round_half_up

from .params import ParamVector

__all__ = ("LossFn", "grad_check")

#: Closure from a flat parameter array to ``(loss, flat gradient)``.
LossFn = Callable[[np.ndarray], Tuple[float, np.ndarray]]


def grad_check(
    loss_fn: LossFn,
    params: Union[ParamVector, np.ndarray],
    seed: int,
    *,
    fraction: float = 0.05,
    step: float = 1e-3,
    floor: float = 1e-3,
) -> float:
    """
    Compare the analytic gradient with central differences.

    A random ``fraction`` of the coordinates (at least one) is perturbed by
    ``+-step`` in float64. The error of a coordinate is
    ``|analytic - numeric| / max(|analytic| + |numeric|, floor)``.

    Returns
    -------
    float
        Largest error over the sampled coordinates.
    """
    values = params.values if isinstance(params, ParamVector) else params
    values = np.array(values, dtype=np.float64).reshape(-1)
    _, analytic = loss_fn(values.copy())
    analytic = np.asarray(analytic, dtype=np.float64).reshape(-1)
    count = min(values.size, max(1, round_half_up(fraction * values.size)))
    coords = make_rng(seed).choice(values.size, size=count, replace=False)
    worst = 0.0
    for coord in coords.tolist():
        shifted = values.copy()
        shifted[coord] += step
        plus, _ = loss_fn(shifted)
        shifted[coord] -= 2 * step
        minus, _ = loss_fn(shifted)
        numeric = (plus - minus) / (2 * step)
        error = abs(analytic[coord] - numeric) / max(
            abs(analytic[coord]) + abs(numeric), floor
        )
        worst = max(worst, error)
    return worst
