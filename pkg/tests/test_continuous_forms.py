import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_graph, random_model
from downsample_gcn.continuous_forms import (
    StepFunction1D,
    StepFunction2D,
    graphon_cell_moments,
    induce_graphon,
    induce_signal,
    l2_distance_1d,
    l2_distance_2d,
    l2_norm_1d,
    l2_norm_2d,
    merged_partition,
    relative_error,
    signal_cell_moments,
    step_graphon_distance,
    step_signal_distance,
    wnn_forward,
    wnn_shift,
)
from downsample_gcn.errors import DegenerateOutputError, DomainError
from downsample_gcn.gcn_engine import GcnModel, NormalizedShift, gcn_forward
from downsample_gcn.graph_sampler import SparseGraph
from downsample_gcn.kernel_model import Graphon, Kernel, SignalFunction

EDGE2 = SparseGraph.from_edges(2, [0], [1])

step_values = st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=12)


def riemann_distance(f, g, points=1_000_000):
    u = (np.arange(points) + 0.5) / points
    return math.sqrt(float(np.mean((f(u) - g(u)) ** 2)))


def test_induce_signal_examples():
    f = induce_signal([4.0])
    assert np.all(f(np.linspace(0, 1, 11)) == 4.0)
    g = induce_signal([1.0, 3.0])
    assert g(0.0) == 1.0 and g(0.49) == 1.0 and g(0.5) == 3.0 and g(1.0) == 3.0
    assert l2_norm_1d(g) == pytest.approx(math.sqrt(5))
    with pytest.raises(DomainError):
        induce_signal([])


def test_induce_graphon_examples():
    assert l2_norm_2d(induce_graphon(SparseGraph.empty(3))) == 0.0
    W = induce_graphon(EDGE2, 1.0)
    assert np.array_equal(W.values, [[0.0, 1.0], [1.0, 0.0]])
    assert l2_norm_2d(W) == pytest.approx(1 / math.sqrt(2))
    with pytest.raises(DomainError):
        induce_graphon(np.ones((2, 3)))


def test_l2_distance_1d_examples():
    f = induce_signal([1.0, 3.0])
    assert l2_distance_1d(f, f) == 0.0
    assert l2_distance_1d(f, induce_signal([2.0])) == pytest.approx(1.0)
    assert l2_distance_1d(induce_signal([1.0, 2.0, 3.0]), f) == pytest.approx(math.sqrt(1 / 3))


def test_l2_distance_2d_examples():
    W = induce_graphon(EDGE2)
    assert l2_distance_2d(W, W) == 0.0
    assert l2_distance_2d(W, StepFunction2D(np.zeros((3, 3)))) == pytest.approx(1 / math.sqrt(2))


def test_merged_partition_exact():
    w, i, j = merged_partition(3, 2)
    assert np.allclose(w, [1 / 3, 1 / 6, 1 / 6, 1 / 3])
    assert list(i) == [0, 1, 1, 2] and list(j) == [0, 0, 1, 1]
    w, _, _ = merged_partition(4, 8)
    assert w.size == 8


def test_merged_grid_vs_riemann_oracle(rng):
    worst = 0.0
    for _ in range(100):
        f = StepFunction1D(rng.normal(size=int(rng.integers(1, 40))))
        g = StepFunction1D(rng.normal(size=int(rng.integers(1, 40))))
        worst = max(worst, abs(l2_distance_1d(f, g) - riemann_distance(f, g)))
    assert worst <= 1e-5


def test_l2_distance_2d_step_vs_step_oracle(rng):
    F = StepFunction2D(rng.normal(size=(3, 3)))
    G = StepFunction2D(rng.normal(size=(5, 5)))
    m = 1500
    u = (np.arange(m) + 0.5) / m
    U, V = np.meshgrid(u, u, indexing="ij")
    oracle = math.sqrt(float(np.mean((F(U, V) - G(U, V)) ** 2)))
    assert l2_distance_2d(F, G) == pytest.approx(oracle, abs=1e-5)


@settings(max_examples=100, deadline=None)
@given(step_values, step_values, step_values)
def test_l2_distance_is_metric(a, b, c):
    f, g, h = StepFunction1D(a), StepFunction1D(b), StepFunction1D(c)
    assert l2_distance_1d(f, g) == pytest.approx(l2_distance_1d(g, f), abs=1e-12)
    assert l2_distance_1d(f, f) == 0.0
    assert l2_distance_1d(f, h) <= l2_distance_1d(f, g) + l2_distance_1d(g, h) + 1e-12


@settings(max_examples=100, deadline=None)
@given(step_values)
def test_signal_norm_identity(vals):
    x = np.array(vals)
    assert l2_norm_1d(induce_signal(x)) ** 2 == pytest.approx(np.mean(x ** 2), rel=1e-12, abs=1e-300)


def test_graphon_distance_zero_graphon():
    g = Graphon(Kernel("exp-product", 0.0), 5.0)
    assert l2_distance_2d(StepFunction2D(np.zeros((4, 4))), g) == 0.0
    assert step_graphon_distance(SparseGraph.empty(4), graphon_cell_moments(g, 4)) == 0.0


def test_graphon_distance_against_dense_quadrature(rng):
    g = Graphon(Kernel("exp-product", 30.0), 4.0)
    graph = random_graph(12, 0.3, rng)
    sparse_way = step_graphon_distance(graph, graphon_cell_moments(g, 12, 16))
    m = 12 * 64
    u = (np.arange(m) + 0.5) / m
    U, V = np.meshgrid(u, u, indexing="ij")
    step = induce_graphon(graph)
    oracle = math.sqrt(float(np.mean((step(U, V) - g(U, V)) ** 2)))
    assert sparse_way == pytest.approx(oracle, rel=2e-3)


def test_signal_distance_constant_zero():
    X = SignalFunction("constant", value=2.0)
    assert step_signal_distance(np.full(7, 2.0), signal_cell_moments(X, 7)) == 0.0


def test_wnn_shift_examples(rng):
    X = induce_signal([1.0, 3.0])
    assert np.array_equal(wnn_shift(StepFunction2D(np.zeros((2, 2))), X).values, [0.0, 0.0])
    assert np.allclose(wnn_shift(StepFunction2D(np.ones((2, 2))), X).values, 2.0)
    g = random_graph(9, 0.4, rng)
    x = rng.normal(size=9)
    via_graph = g.adjacency() @ x / 9
    np.testing.assert_allclose(wnn_shift(induce_graphon(g), induce_signal(x)).values, via_graph, rtol=1e-13)
    with pytest.raises(DomainError):
        wnn_shift(StepFunction2D(np.ones((3, 3))), X)


def test_wnn_forward_examples():
    zero = GcnModel(2, 2, 3, (np.zeros((1, 2, 3)), np.zeros((2, 1, 3))))
    out = wnn_forward(zero, induce_graphon(EDGE2), induce_signal([1.0, 2.0]))
    assert np.array_equal(out.values, [0.0, 0.0])
    one = GcnModel(1, 1, 2, (np.array([[[0.0, 1.0]]]),), "relu")
    out = wnn_forward(one, induce_graphon(EDGE2), induce_signal([1.0, 2.0]))
    # relu((1/2) S x) with S = [[0,1],[1,0]] and x = [1,2]
    assert np.allclose(out.values, [1.0, 0.5])


def test_lemma1_equivalence(rng):
    worst = 0.0
    for _ in range(30):
        n = int(rng.integers(1, 33))
        model = random_model(int(rng.integers(1, 4)), int(rng.integers(1, 5)), int(rng.integers(1, 5)),
                             rng, "tanh")
        g = random_graph(n, 0.4, rng)
        x = rng.normal(size=n)
        y = gcn_forward(model, NormalizedShift(g, float(n)), x)
        z = wnn_forward(model, induce_graphon(g), induce_signal(x)).values
        worst = max(worst, np.abs(y - z).max() / max(np.abs(y).max(), 1e-300))
    assert worst <= 1e-10


def test_relative_error_examples():
    Y = induce_signal([1.0, 3.0])
    assert relative_error(Y, Y) == 0.0
    assert relative_error(Y, induce_signal([2.0, 6.0])) == pytest.approx(1.0)
    assert relative_error(Y, induce_signal([2.0])) == pytest.approx(1 / math.sqrt(5))
    with pytest.raises(DegenerateOutputError):
        relative_error(induce_signal([0.0, 0.0]), Y)


def test_step_function_validation():
    with pytest.raises(DomainError):
        StepFunction1D(np.array([np.nan]))
    with pytest.raises(DomainError):
        StepFunction2D(np.zeros((2, 3)))
