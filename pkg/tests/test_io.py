import numpy as np
import pytest

from conftest import random_graph
from downsample_gcn import io as dio
from downsample_gcn.continuous_forms import StepFunction1D, StepFunction2D
from downsample_gcn.errors import ConfigError, DomainError
from downsample_gcn.gcn_engine import random_init


def test_graph_round_trip_and_format(tmp_path, rng):
    g = random_graph(30, 0.2, rng)
    path = tmp_path / "g.txt"
    dio.write_graph(path, g)
    lines = path.read_text().splitlines()
    assert lines[0] == f"30 {g.m}"
    pairs = [tuple(map(int, ln.split())) for ln in lines[1:]]
    assert all(i < j for i, j in pairs) and pairs == sorted(pairs)
    assert dio.read_graph(path).same_edges(g)


def test_graph_header_mismatch(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("3 2\n0 1\n")
    with pytest.raises(DomainError):
        dio.read_graph(path)


def test_vector_round_trip_exact(tmp_path, rng):
    x = rng.normal(size=50) * 1e-3 + np.pi
    path = tmp_path / "x.txt"
    dio.write_vector(path, x)
    assert np.array_equal(dio.read_vector(path), x)
    assert len(path.read_text().splitlines()) == 50


def test_model_round_trip(tmp_path):
    m = random_init(3, 4, 3, 5, 7.0, "tanh")
    path = tmp_path / "m.txt"
    dio.write_model(path, m)
    lines = path.read_text().splitlines()
    assert lines[0] == "3 4 3 tanh"
    assert len(lines) == 1 + (4 + 16 + 4) * 3
    back = dio.read_model(path)
    assert back.activation == "tanh"
    assert all(np.array_equal(a, b) for a, b in zip(m.taps, back.taps))
    path.write_text("\n".join(lines[:-1]) + "\n")
    with pytest.raises(ConfigError):
        dio.read_model(path)


def test_step_function_round_trip(tmp_path, rng):
    f = StepFunction1D(rng.normal(size=7))
    F = StepFunction2D(rng.normal(size=(4, 4)))
    dio.write_step1d(tmp_path / "f.txt", f)
    dio.write_step2d(tmp_path / "F.txt", F)
    assert (tmp_path / "f.txt").read_text().splitlines()[0] == "7"
    assert np.array_equal(dio.read_step1d(tmp_path / "f.txt").values, f.values)
    assert np.array_equal(dio.read_step2d(tmp_path / "F.txt").values, F.values)
