"""Induced continuous forms of graphs and signals.

A length-n vector becomes a step function on the equal partition
``I_i = [(i-1)/n, i/n)`` of [0, 1]; an n x n matrix becomes a step function
on the product partition.  Distances between step functions of different
resolutions are computed exactly on the merged breakpoint set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateOutputError, DomainError
from .gcn_engine import GcnModel, activation_fn
from .graph_sampler import SparseGraph
from .kernel_model import Graphon, SignalFunction

__all__ = [
    "StepFunction1D",
    "StepFunction2D",
    "induce_signal",
    "induce_graphon",
    "l2_norm_1d",
    "l2_norm_2d",
    "l2_distance_1d",
    "l2_distance_2d",
    "merged_partition",
    "graphon_cell_moments",
    "signal_cell_moments",
    "step_graphon_distance",
    "step_signal_distance",
    "wnn_shift",
    "wnn_convolve",
    "wnn_forward",
    "relative_error",
]

MIN_REFINEMENT = 8


@dataclass(frozen=True, eq=False)
class StepFunction1D:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise DomainError("a 1-D step function needs a nonempty vector of values")
        if not np.all(np.isfinite(v)):
            raise DomainError("step function values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size

    def __call__(self, u):
        idx = np.minimum((np.asarray(u, dtype=float) * self.n).astype(np.int64), self.n - 1)
        return self.values[idx]


@dataclass(frozen=True, eq=False)
class StepFunction2D:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] == 0:
            raise DomainError("a 2-D step function needs a nonempty square matrix")
        if not np.all(np.isfinite(v)):
            raise DomainError("step function values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __call__(self, u, v):
        iu = np.minimum((np.asarray(u, dtype=float) * self.n).astype(np.int64), self.n - 1)
        iv = np.minimum((np.asarray(v, dtype=float) * self.n).astype(np.int64), self.n - 1)
        return self.values[iu, iv]


def induce_signal(x) -> StepFunction1D:
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise DomainError("cannot induce a step function from an empty signal")
    return StepFunction1D(x.copy())


def induce_graphon(S, scale: float = 1.0) -> StepFunction2D:
    """Step function with value ``S[i, j] / scale`` on ``I_i x I_j``."""
    if isinstance(S, SparseGraph):
        S = S.adjacency(float).toarray()
    elif hasattr(S, "toarray"):
        S = S.toarray()
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DomainError("induce_graphon needs a square matrix")
    return StepFunction2D(S / scale)


def l2_norm_1d(f: StepFunction1D) -> float:
    return math.sqrt(float(np.mean(f.values ** 2)))


def l2_norm_2d(F: StepFunction2D) -> float:
    return math.sqrt(float(np.mean(F.values ** 2)))


def merged_partition(n1: int, n2: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Common refinement of the equal n1- and n2-partitions of [0, 1].

    Returns cell widths and, per merged cell, the index of the containing
    cell in each partition.  Breakpoints are handled as integers over
    ``lcm(n1, n2)`` so coinciding breakpoints merge exactly.
    """
    den = math.lcm(n1, n2)
    bp = np.union1d(np.arange(n1 + 1, dtype=np.int64) * (den // n1),
                    np.arange(n2 + 1, dtype=np.int64) * (den // n2))
    left = bp[:-1]
    widths = np.diff(bp) / den
    return widths, left * n1 // den, left * n2 // den


def l2_distance_1d(f: StepFunction1D, g: StepFunction1D) -> float:
    """Exact L2 distance between two step functions of any resolutions."""
    if f.n == g.n:
        return math.sqrt(float(np.mean((f.values - g.values) ** 2)))
    w, i, j = merged_partition(f.n, g.n)
    return math.sqrt(float(np.dot(w, (f.values[i] - g.values[j]) ** 2)))


def l2_distance_2d(F: StepFunction2D, G, refinement: int = MIN_REFINEMENT) -> float:
    """L2 distance from a 2-D step function to another step function or a graphon.

    Step vs step is exact on the merged grid; step vs graphon uses midpoint
    quadrature with ``refinement`` points per step cell per axis.
    """
    if isinstance(G, StepFunction2D):
        if F.n == G.n:
            return math.sqrt(float(np.mean((F.values - G.values) ** 2)))
        w, i, j = merged_partition(F.n, G.n)
        diff = F.values[np.ix_(i, i)] - G.values[np.ix_(j, j)]
        return math.sqrt(float(w @ (diff ** 2) @ w))
    if isinstance(G, Graphon):
        return step_graphon_distance(F.values, graphon_cell_moments(G, F.n, refinement))
    raise DomainError(f"cannot measure distance to {type(G).__name__}")


def graphon_cell_moments(g: Graphon, n: int, refinement: int = MIN_REFINEMENT,
                         scale: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Cell averages of ``W/scale`` and ``(W/scale)^2`` over the n x n partition.

    Midpoint rule with ``refinement`` nodes per cell per axis.
    """
    if refinement < 1:
        raise DomainError("refinement must be positive")
    r = refinement
    sub = (np.arange(n * r) + 0.5) / (n * r)
    m1 = np.empty((n, n))
    m2 = np.empty((n, n))
    rows_per_block = max(1, 2048 // r)
    for a in range(0, n, rows_per_block):
        b = min(a + rows_per_block, n)
        block = g.outer(sub[a * r:b * r], sub, zero_diagonal=False) / scale
        shaped = block.reshape(b - a, r, n, r)
        m1[a:b] = shaped.mean(axis=(1, 3))
        m2[a:b] = (shaped ** 2).mean(axis=(1, 3))
    return m1, m2


def step_graphon_distance(values, moments: tuple[np.ndarray, np.ndarray], scale: float = 1.0) -> float:
    """L2 distance between a step function and a graphon given its cell moments.

    ``values`` may be a dense matrix or a :class:`SparseGraph` (entries 0/1,
    divided by ``scale``).  Uses ``sum (s^2 - 2 s m1 + m2) / n^2`` per cell.
    """
    m1, m2 = moments
    n = m1.shape[0]
    if isinstance(values, SparseGraph):
        if values.n != n:
            raise DomainError("graph size does not match the moment grid")
        rows = np.repeat(np.arange(n), values.degrees())
        cols = values.indices
        s = 1.0 / scale
        total = float(m2.sum()) + s * s * cols.size - 2.0 * s * float(m1[rows, cols].sum())
    else:
        v = np.asarray(values, dtype=float)
        if v.shape != m1.shape:
            raise DomainError("step function size does not match the moment grid")
        total = float(np.sum(v * v - 2.0 * v * m1 + m2))
    return math.sqrt(max(total, 0.0) / (n * n))


def signal_cell_moments(X: SignalFunction, n: int, refinement: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Cell averages of X and X^2 over the equal n-partition (midpoint rule)."""
    sub = (np.arange(n * refinement) + 0.5) / (n * refinement)
    vals = X(sub).reshape(n, refinement)
    return vals.mean(axis=1), (vals ** 2).mean(axis=1)


def step_signal_distance(values, moments: tuple[np.ndarray, np.ndarray]) -> float:
    m1, m2 = moments
    v = np.asarray(values, dtype=float)
    total = float(np.sum(v * v - 2.0 * v * m1 + m2))
    return math.sqrt(max(total, 0.0) / v.size)


def wnn_shift(W: StepFunction2D, X: StepFunction1D) -> StepFunction1D:
    """Integral operator ``v -> int W(u, v) X(u) du`` on step functions."""
    if W.n != X.n:
        raise DomainError(f"partition mismatch: graphon has {W.n} cells, signal has {X.n}")
    return StepFunction1D(W.values.T @ X.values / W.n)


def wnn_convolve(taps, W: StepFunction2D, X: StepFunction1D) -> StepFunction1D:
    """Graphon filter ``sum_k taps[k] T_W^k X``."""
    taps = np.atleast_1d(np.asarray(taps, dtype=float))
    acc = taps[0] * X.values
    cur = X
    for h in taps[1:]:
        cur = wnn_shift(W, cur)
        acc = acc + h * cur.values
    return StepFunction1D(acc)


def wnn_forward(model: GcnModel, W: StepFunction2D, X: StepFunction1D) -> StepFunction1D:
    """Graphon neural network with the same taps and activation as ``model``."""
    if W.n != X.n:
        raise DomainError(f"partition mismatch: graphon has {W.n} cells, signal has {X.n}")
    sigma = activation_fn(model.activation)
    feats = [X]
    for taps in model.taps:
        taps = np.asarray(taps, dtype=float)
        nxt = []
        for g in range(taps.shape[1]):
            z = np.zeros(W.n)
            for f, Xf in enumerate(feats):
                z = z + wnn_convolve(taps[f, g], W, Xf).values
            nxt.append(StepFunction1D(sigma(z)))
        feats = nxt
    return feats[0]


def relative_error(Y_N: StepFunction1D, Y_n: StepFunction1D) -> float:
    """``||Y_N - Y_n|| / ||Y_N||``."""
    norm = l2_norm_1d(Y_N)
    if norm == 0.0:
        raise DegenerateOutputError("large-graph output has zero L2 norm")
    return l2_distance_1d(Y_N, Y_n) / norm
