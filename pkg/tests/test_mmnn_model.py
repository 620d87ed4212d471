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

import itertools

import numpy as np
import pytest
from conftest import IMAGE, TEXT, build_graph

from mmgraph import Modality, MultimodalGraph, make_rng
from mmnn import (
    SGD,
    Adam,
    Architecture,
    Fusion,
    InvalidModelSpec,
    LayoutMismatch,
    ModelSpec,
    NonFiniteGradient,
    OptimizerConfig,
    OptimizerKind,
    ParamLayout,
    ParamVector,
    ShapeMismatch,
    backward,
    forward,
    init_params,
    make_batch,
    make_optimizer,
    normalize_adjacency,
    sgd_step,
)


def random_graph(num_nodes: int, p: float, seed: int) -> MultimodalGraph:
    rng = make_rng(seed)
    edges = [
        pair
        for pair in itertools.combinations(range(num_nodes), 2)
        if rng.random() < p
    ]
    labels = rng.integers(0, 3, size=num_nodes)
    return build_graph(
        num_nodes, edges, labels=labels.tolist(), num_classes=3, seed=seed
    )


def test_normalized_adjacency_matches_dense_formula() -> None:
    graph = random_graph(30, 0.2, seed=3)
    dense = np.zeros((30, 30))
    for u, v in graph.edges:
        dense[u, v] = dense[v, u] = 1.0
    a_tilde = dense + np.eye(30)
    scale = np.diag(1.0 / np.sqrt(a_tilde.sum(axis=1)))
    expected = scale @ a_tilde @ scale
    np.testing.assert_allclose(
        normalize_adjacency(graph).toarray(), expected, atol=1e-6
    )


def test_isolated_node_keeps_its_own_row() -> None:
    graph = build_graph(3, [(0, 1)])
    adjacency = normalize_adjacency(graph).toarray()
    assert adjacency[2].tolist() == [0.0, 0.0, 1.0]


@pytest.mark.parametrize("architecture", list(Architecture))
def test_forward_shapes(architecture: Architecture) -> None:
    graph = random_graph(12, 0.3, seed=1)
    spec = ModelSpec(architecture, (TEXT, IMAGE), (8, 5), output_dim=3)
    result = forward(spec, init_params(spec, 0), make_batch(graph))
    assert result.output.shape == (12, 3)
    assert result.hidden.shape == (12, spec.embedding_dim)
    assert result.output.dtype == np.float32
    if architecture is Architecture.MMGCN:
        assert set(result.branches) == {"text", "image"}
    else:
        assert result.branches == {}


def test_concat_fusion_widens_embedding() -> None:
    spec = ModelSpec(
        Architecture.MMGCN, (TEXT, IMAGE), (6,), output_dim=2, fusion=Fusion.CONCAT
    )
    assert spec.embedding_dim == 12
    assert spec.layout().segment("head.weight").shape == (12, 2)


def test_single_branch_matches_plain_gcn() -> None:
    graph = build_graph(
        8, [(0, 1), (1, 2), (2, 3), (4, 5), (5, 6), (0, 7)], modalities=(TEXT,)
    )
    batch = make_batch(graph)
    gcn = ModelSpec(Architecture.GCN, (TEXT,), (5, 4), output_dim=3)
    branch = ModelSpec(Architecture.MMGCN, (TEXT,), (5, 4), output_dim=3)
    params = init_params(gcn, 7)
    assert gcn.layout().size == branch.layout().size
    same = ParamVector(branch.layout(), params.values.copy())
    np.testing.assert_allclose(
        forward(gcn, params, batch).output,
        forward(branch, same, batch).output,
        atol=1e-6,
    )


def test_masked_mean_ignores_missing_branch() -> None:
    graph = build_graph(4, [(0, 1), (2, 3)])
    mask = np.array([[True, True], [True, False], [False, True], [True, True]])
    batch = make_batch(graph.with_modality_mask(mask))
    mm_spec = ModelSpec(Architecture.MMGCN, (TEXT, IMAGE), (4,), output_dim=2)
    result = forward(mm_spec, init_params(mm_spec, 1), batch)
    np.testing.assert_allclose(result.hidden[1], result.branches["text"][1])
    np.testing.assert_allclose(result.hidden[2], result.branches["image"][2])
    assert not batch.features["image"][1].any()


def test_init_params_is_deterministic_glorot() -> None:
    spec = ModelSpec(Architecture.GCN, (TEXT, IMAGE), (16,), output_dim=3)
    first, second = init_params(spec, 4), init_params(spec, 4)
    assert first.values.tobytes() == second.values.tobytes()
    assert first.dtype == np.float32
    weight = first.view("layer0.weight")
    assert np.abs(weight).max() <= np.sqrt(6.0 / (7 + 16))
    assert not first.view("layer0.bias").any()
    assert init_params(spec, 5).values.tobytes() != first.values.tobytes()


def test_invalid_specs() -> None:
    with pytest.raises(InvalidModelSpec):
        ModelSpec(Architecture.MLP, (), (4,), output_dim=2)
    with pytest.raises(InvalidModelSpec):
        ModelSpec(Architecture.MLP, (TEXT,), (), output_dim=2)
    with pytest.raises(InvalidModelSpec):
        ModelSpec(Architecture.MLP, (TEXT,), (4, 0), output_dim=2)
    with pytest.raises(InvalidModelSpec):
        ModelSpec(Architecture.MLP, (TEXT,), (4,), output_dim=0)


def test_forward_rejects_foreign_params() -> None:
    graph = random_graph(5, 0.5, seed=0)
    spec = ModelSpec(Architecture.MLP, (TEXT, IMAGE), (4,), output_dim=2)
    other = ModelSpec(Architecture.MLP, (TEXT, IMAGE), (5,), output_dim=2)
    with pytest.raises(LayoutMismatch):
        forward(spec, init_params(other, 0), make_batch(graph))


def test_forward_rejects_wrong_feature_width() -> None:
    graph = random_graph(5, 0.5, seed=0)
    wide = Modality("text", 6)
    spec = ModelSpec(Architecture.MMGCN, (wide, IMAGE), (4,), output_dim=2)
    with pytest.raises(ShapeMismatch):
        forward(spec, init_params(spec, 0), make_batch(graph))


def test_layout_tiles_without_gaps() -> None:
    spec = ModelSpec(
        Architecture.MMGCN, (TEXT, IMAGE), (4, 3), output_dim=2, reconstruction=True
    )
    layout = spec.layout()
    assert layout.names[:2] == ("text.layer0.weight", "text.layer0.bias")
    assert layout.head_segments == ("head.weight", "head.bias")
    assert layout.segment("recon.weight").shape == (3, 7)
    assert layout.size == sum(segment.size for segment in layout)
    assert layout.selection(lambda name: name.startswith("head.")).sum() == 3 * 2 + 2


def test_param_vector_length_is_checked() -> None:
    layout = ParamLayout.from_shapes([("w", (2, 2)), ("b", (2,))])
    with pytest.raises(LayoutMismatch):
        ParamVector(layout, np.zeros(5))
    params = ParamVector.zeros(layout)
    params.view("b")[...] = 1.0
    assert params.values.tolist() == [0, 0, 0, 0, 1, 1]
    assert params.nbytes == 24


def _scalar_layout() -> ParamLayout:
    return ParamLayout.from_shapes([("w", (1,))])


def test_adam_matches_scalar_trace() -> None:
    # minimize 0.5 * (w - 3)^2 from w = 0
    config = OptimizerConfig(OptimizerKind.ADAM, lr=0.1, weight_decay=0.0)
    optimizer = Adam(config)
    params = ParamVector(_scalar_layout(), np.zeros(1, dtype=np.float64))
    w, m, v = 0.0, 0.0, 0.0
    for t in range(1, 11):
        grad = w - 3.0
        m = 0.9 * m + 0.1 * grad
        v = 0.999 * v + 0.001 * grad * grad
        m_hat = m / (1 - 0.9**t)
        v_hat = v / (1 - 0.999**t)
        w = w - 0.1 * m_hat / (v_hat**0.5 + 1e-8)
        grads = params.with_values(params.values - 3.0)
        params = optimizer.step(params, grads)
        assert params.values[0] == pytest.approx(w, abs=1e-6)
    assert optimizer.steps == 10
    optimizer.reset()
    assert optimizer.first_moment is None


def test_sgd_step_applies_weight_decay() -> None:
    config = OptimizerConfig(OptimizerKind.SGD, lr=0.5, weight_decay=0.1)
    params = ParamVector(_scalar_layout(), np.array([2.0]))
    grads = params.with_values(np.array([1.0]))
    # 2 - 0.5 * (1 + 0.1 * 2)
    assert sgd_step(params, grads, config).values[0] == pytest.approx(1.4)
    assert isinstance(make_optimizer(config), SGD)
    assert isinstance(make_optimizer(OptimizerConfig()), Adam)


def test_frozen_coordinates_stay_put() -> None:
    layout = ParamLayout.from_shapes([("a", (2,)), ("b", (2,))])
    params = ParamVector(layout, np.ones(4))
    grads = params.with_values(np.full(4, 5.0))
    trainable = layout.selection(lambda name: name == "b")
    config = OptimizerConfig(OptimizerKind.SGD, lr=0.1, weight_decay=0.5)
    updated = SGD(config).step(params, grads, trainable)
    assert updated.view("a").tolist() == [1.0, 1.0]
    assert updated.view("b").tolist() == pytest.approx([0.45, 0.45])


def test_non_finite_gradient_names_segment() -> None:
    layout = ParamLayout.from_shapes([("a", (2,)), ("b", (2,))])
    params = ParamVector(layout, np.zeros(4))
    grads = params.with_values(np.array([0.0, 0.0, np.nan, np.inf]))
    with pytest.raises(NonFiniteGradient) as excinfo:
        Adam(OptimizerConfig()).step(params, grads)
    assert excinfo.value.segment == "b"
    assert excinfo.value.count == 2


def test_backward_without_upstream_is_zero() -> None:
    graph = random_graph(6, 0.4, seed=2)
    spec = ModelSpec(Architecture.GCN, (TEXT, IMAGE), (4,), output_dim=2)
    params = init_params(spec, 0)
    batch = make_batch(graph)
    grads = backward(spec, params, batch, forward(spec, params, batch))
    assert not grads.values.any()
