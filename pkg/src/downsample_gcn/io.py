"""Plain-text formats for graphs, vectors, models and step functions.

Graph: header ``n m`` then one ``i j`` line per edge with ``i < j`` in
lexicographic order.  Vectors: one value per line.  Model: header
``L F K activation`` then every tap, one per line, in (layer, f_in, f_out,
k) order.  Step functions: header ``n`` then the values (one row of the
matrix per line for 2-D).  Reals carry 17 significant digits so files
round-trip exactly.
"""
from __future__ import annotations

import numpy as np

from .continuous_forms import StepFunction1D, StepFunction2D
from .errors import ConfigError, DomainError
from .gcn_engine import GcnModel
from .graph_sampler import SparseGraph

__all__ = [
    "write_graph",
    "read_graph",
    "write_vector",
    "read_vector",
    "write_model",
    "read_model",
    "write_step1d",
    "read_step1d",
    "write_step2d",
    "read_step2d",
]

REAL_FMT = "%.17g"


def _data_lines(path):
    with open(path, encoding="utf-8") as fh:
        return [ln.split() for ln in fh if ln.strip()]


def write_graph(path, graph: SparseGraph) -> None:
    rows, cols = graph.edges()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{graph.n} {graph.m}\n")
        fh.writelines(f"{i} {j}\n" for i, j in zip(rows.tolist(), cols.tolist()))


def read_graph(path) -> SparseGraph:
    lines = _data_lines(path)
    if not lines or len(lines[0]) != 2:
        raise DomainError(f"{path}: expected header 'n m'")
    n, m = (int(v) for v in lines[0])
    body = lines[1:]
    if len(body) != m or any(len(ln) != 2 for ln in body):
        raise DomainError(f"{path}: header announces {m} edges, found {len(body)} edge lines")
    edges = np.array(body, dtype=np.int64).reshape(-1, 2)
    return SparseGraph.from_edges(n, edges[:, 0], edges[:, 1])


def write_vector(path, values) -> None:
    np.savetxt(path, np.asarray(values, dtype=float).reshape(-1), fmt=REAL_FMT)


def read_vector(path) -> np.ndarray:
    vals = np.loadtxt(path, dtype=float, ndmin=1)
    if vals.ndim != 1:
        raise DomainError(f"{path}: expected one value per line")
    return vals


def write_model(path, model: GcnModel) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{model.L} {model.F} {model.K} {model.activation}\n")
        for t in model.taps:
            fh.writelines(REAL_FMT % v + "\n" for v in np.asarray(t, dtype=float).reshape(-1))


def read_model(path) -> GcnModel:
    lines = _data_lines(path)
    if not lines or len(lines[0]) != 4:
        raise ConfigError(f"{path}: expected header 'L F K activation'")
    L, F, K = (int(v) for v in lines[0][:3])
    activation = lines[0][3]
    values = np.array([float(v) for ln in lines[1:] for v in ln])
    widths = [1] + [F] * (L - 1) + [1]
    taps, pos = [], 0
    for l in range(1, L + 1):
        shape = (widths[l - 1], widths[l], K)
        size = int(np.prod(shape))
        if pos + size > values.size:
            raise ConfigError(f"{path}: too few tap values for layer {l}")
        taps.append(values[pos:pos + size].reshape(shape))
        pos += size
    if pos != values.size:
        raise ConfigError(f"{path}: {values.size - pos} unexpected trailing tap values")
    return GcnModel(L, F, K, tuple(taps), activation)


def write_step1d(path, f: StepFunction1D) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{f.n}\n")
        np.savetxt(fh, f.values, fmt=REAL_FMT)


def read_step1d(path) -> StepFunction1D:
    lines = _data_lines(path)
    n = int(lines[0][0])
    vals = np.array([float(ln[0]) for ln in lines[1:]])
    if vals.size != n:
        raise DomainError(f"{path}: header announces {n} values, found {vals.size}")
    return StepFunction1D(vals)


def write_step2d(path, F: StepFunction2D) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{F.n}\n")
        np.savetxt(fh, F.values, fmt=REAL_FMT)


def read_step2d(path) -> StepFunction2D:
    lines = _data_lines(path)
    n = int(lines[0][0])
    rows = lines[1:]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise DomainError(f"{path}: expected {n} rows of {n} values")
    return StepFunction2D(np.array(rows, dtype=float))
