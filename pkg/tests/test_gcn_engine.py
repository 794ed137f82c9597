import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import dense_forward, random_graph, random_model
from downsample_gcn.errors import ConfigError, DomainError
from downsample_gcn.gcn_engine import (
    GcnModel,
    NormalizedShift,
    filter_lipschitz,
    filter_response,
    gcn_forward,
    graph_convolve,
    make_shift,
    random_init,
)
from downsample_gcn.graph_sampler import SparseGraph

PATH3 = SparseGraph.from_edges(3, [0, 1], [1, 2])
EDGE2 = SparseGraph.from_edges(2, [0], [1])


def test_make_shift():
    g = SparseGraph.empty(4)
    assert make_shift(g, "by_n").scale == 4
    eps = 0.0195
    assert make_shift(SparseGraph.empty(2048), "by_eps_n", eps).scale == pytest.approx(2048 * eps)
    with pytest.raises(DomainError):
        make_shift(g, "by_eps_n", 0.0)
    with pytest.raises(DomainError):
        make_shift(g, "by_degree")


def test_graph_convolve_examples():
    x = np.array([1.0, 2.0])
    s1 = NormalizedShift(EDGE2, 1.0)
    assert np.array_equal(graph_convolve([1.0], s1, x), x)
    assert np.array_equal(graph_convolve([0.0, 1.0], s1, x), [2.0, 1.0])
    out = graph_convolve([0.0, 0.0, 1.0], NormalizedShift(PATH3, 1.0), np.array([1.0, 0.0, 0.0]))
    assert np.array_equal(out, [1.0, 0.0, 1.0])
    with pytest.raises(DomainError):
        graph_convolve([1.0], s1, np.ones(3))


def test_graph_convolve_matches_dense(rng):
    g = random_graph(20, 0.3, rng)
    shift = NormalizedShift(g, 7.0)
    S = shift.dense()
    taps = rng.uniform(-1, 1, 5)
    x = rng.normal(size=20)
    ref = sum(taps[k] * np.linalg.matrix_power(S, k) @ x for k in range(5))
    np.testing.assert_allclose(graph_convolve(taps, shift, x), ref, rtol=1e-12, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32), st.floats(-3, 3), st.floats(-3, 3))
def test_graph_convolve_linear(seed, a, b):
    rng = np.random.default_rng(seed)
    shift = NormalizedShift(random_graph(15, 0.4, rng), 15.0)
    taps = rng.uniform(-1, 1, 4)
    x, y = rng.normal(size=15), rng.normal(size=15)
    lhs = graph_convolve(taps, shift, a * x + b * y)
    rhs = a * graph_convolve(taps, shift, x) + b * graph_convolve(taps, shift, y)
    scale = max(np.abs(lhs).max(), np.abs(rhs).max(), 1.0)
    assert np.abs(lhs - rhs).max() <= 1e-12 * scale


def test_identity_filter_any_graph(rng):
    for n in (1, 5, 30):
        shift = NormalizedShift(random_graph(n, 0.5, rng), 2.0)
        x = rng.normal(size=n)
        assert np.array_equal(graph_convolve([1.0, 0.0, 0.0], shift, x), x)


def test_forward_examples():
    zero = GcnModel(2, 3, 2, (np.zeros((1, 3, 2)), np.zeros((3, 1, 2))), "relu")
    assert np.array_equal(gcn_forward(zero, NormalizedShift(PATH3, 1.0), np.ones(3)), np.zeros(3))
    ident = GcnModel(1, 1, 1, (np.ones((1, 1, 1)),), "relu")
    out = gcn_forward(ident, NormalizedShift(EDGE2, 5.0), np.array([-1.0, 2.0]))
    assert np.array_equal(out, [0.0, 2.0])


def test_forward_path_graph_dense_reference():
    taps = (
        np.array([[[0.5, -1.0], [0.25, 2.0]]]),
        np.array([[[1.0, 0.5]], [[-0.5, 1.5]]]),
    )
    model = GcnModel(2, 2, 2, taps, "relu")
    x = np.array([1.0, -2.0, 3.0])
    shift = NormalizedShift(PATH3, 3.0)
    np.testing.assert_allclose(gcn_forward(model, shift, x), dense_forward(model, shift.dense(), x),
                               rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("activation", ["relu", "tanh"])
def test_forward_matches_dense_random(rng, activation):
    worst = 0.0
    for _ in range(30):
        n = int(rng.integers(2, 33))
        model = random_model(int(rng.integers(1, 4)), int(rng.integers(1, 5)), int(rng.integers(1, 5)),
                             rng, activation)
        shift = NormalizedShift(random_graph(n, 0.3, rng), float(n))
        x = rng.normal(size=n)
        ref = dense_forward(model, shift.dense(), x)
        got = gcn_forward(model, shift, x)
        worst = max(worst, np.abs(got - ref).max() / max(np.abs(ref).max(), 1e-300))
    assert worst <= 1e-10


def test_permutation_equivariance(rng):
    n = 64
    g = random_graph(n, 0.1, rng)
    model = random_model(3, 4, 3, rng, "tanh")
    x = rng.normal(size=n)
    perm = rng.permutation(n)
    inv = np.argsort(perm)
    r, c = g.edges()
    gp = SparseGraph.from_edges(n, inv[r], inv[c])
    y = gcn_forward(model, NormalizedShift(g, n), x)
    yp = gcn_forward(model, NormalizedShift(gp, n), x[perm])
    np.testing.assert_allclose(yp, y[perm], rtol=1e-12, atol=1e-14)


def test_forward_width_errors():
    with pytest.raises(ConfigError):
        GcnModel(2, 3, 2, (np.zeros((1, 2, 2)), np.zeros((3, 1, 2))))
    with pytest.raises(ConfigError):
        GcnModel(1, 1, 1, (np.ones((1, 1, 1)),), "sigmoid")
    model = GcnModel(1, 1, 1, (np.ones((1, 1, 1)),))
    with pytest.raises(ConfigError):
        gcn_forward(model, NormalizedShift(EDGE2, 1.0), np.ones((2, 2)))


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("R", [0.5, 1.0, 60.0])
def test_random_init_non_amplifying(seed, R):
    model = random_init(3, 8, 4, seed, R)
    grid = np.linspace(-R, R, 1024)
    for taps in model.filters():
        assert np.abs(filter_response(taps, grid)).max() <= 1.0


def test_random_init_k1_and_determinism():
    m = random_init(2, 3, 1, 4, 10.0)
    for taps in m.filters():
        assert abs(taps[0]) <= 1.0
    a, b = random_init(3, 4, 4, 11, 2.0), random_init(3, 4, 4, 11, 2.0)
    assert all(np.array_equal(x, y) for x, y in zip(a.taps, b.taps))
    assert not np.array_equal(a.taps[0], random_init(3, 4, 4, 12, 2.0).taps[0])


def test_activation_properties():
    for act in ("relu", "tanh"):
        m = GcnModel(1, 1, 1, (np.ones((1, 1, 1)),), act)
        z = np.linspace(-5, 5, 1001)
        y = gcn_forward(m, NormalizedShift(SparseGraph.empty(z.size), 1.0), z)
        assert y[500] == 0.0
        assert np.all(np.abs(np.diff(y)) <= np.abs(np.diff(z)) + 1e-15)


def test_filter_response_examples():
    assert np.all(filter_response([2.5], [-3.0, 0.0, 7.0]) == 2.5)
    assert filter_response([0.0, 1.0], 0.5) == 0.5
    assert filter_response([1.0, 2.0, 3.0], 2.0) == 17.0


def test_filter_lipschitz_examples():
    assert filter_lipschitz([3.0], (-1, 1)) == 0.0
    assert filter_lipschitz([0.0, 1.0], (-4, 9)) == pytest.approx(1.0)
    assert filter_lipschitz([0.0, 0.0, 1.0], (-1, 1)) == pytest.approx(2.0)
