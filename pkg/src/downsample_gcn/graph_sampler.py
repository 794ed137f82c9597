"""Sampling sparse graphs from the model and downsampling them.

Large graphs are drawn from the size-N graphon ``W_N``.  A downsampled graph
shares that same graphon: it is either the induced subgraph on a uniform
node subset (``induced``) or a fresh draw of n nodes from ``W_N``
(``resample``).  The size-n graphon ``W_n`` is never used here.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DomainError
from .kernel_model import Graphon, SignalFunction

__all__ = [
    "SparseGraph",
    "SampledInstance",
    "sample_latents",
    "sample_graph",
    "downsample",
    "empirical_density",
    "DOWNSAMPLE_MODES",
]

DOWNSAMPLE_MODES = ("induced", "resample")

# Rows per block of pair draws; part of the RNG-stream contract only through
# the fact that draws are consumed in lexicographic (i, j) order.
_ROW_BLOCK = 256


@dataclass(frozen=True, eq=False)
class SparseGraph:
    """Undirected simple graph stored as CSR neighbor lists (both directions)."""

    n: int
    indptr: np.ndarray
    indices: np.ndarray

    @property
    def m(self) -> int:
        return int(self.indices.size // 2)

    @classmethod
    def from_edges(cls, n: int, rows, cols) -> "SparseGraph":
        """Build from an undirected edge list; duplicates and self-loops are rejected."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        if rows.shape != cols.shape:
            raise DomainError("edge endpoint arrays differ in length")
        if rows.size and (min(rows.min(), cols.min()) < 0 or max(rows.max(), cols.max()) >= n):
            raise DomainError("edge endpoint out of range")
        if np.any(rows == cols):
            raise DomainError("self-loops are not allowed")
        lo = np.minimum(rows, cols)
        hi = np.maximum(rows, cols)
        if np.unique(lo * n + hi).size != lo.size:
            raise DomainError("duplicate edges")
        data = np.ones(2 * lo.size, dtype=np.int8)
        a = sp.csr_matrix(
            (data, (np.concatenate([lo, hi]), np.concatenate([hi, lo]))), shape=(n, n)
        )
        a.sort_indices()
        return cls(n, a.indptr.astype(np.int64), a.indices.astype(np.int64))

    @classmethod
    def empty(cls, n: int) -> "SparseGraph":
        return cls(n, np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64))

    def adjacency(self, dtype=float) -> sp.csr_matrix:
        data = np.ones(self.indices.size, dtype=dtype)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Edges ``(i, j)`` with ``i < j`` in ascending lexicographic order."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees())
        keep = rows < self.indices
        return rows[keep], self.indices[keep]

    def same_edges(self, other: "SparseGraph") -> bool:
        return (
            self.n == other.n
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )


@dataclass(frozen=True, eq=False)
class SampledInstance:
    """A graph with its node signal and sorted latent features.

    ``graphon`` is always the generating large-scale graphon ``W_N``.
    """

    graph: SparseGraph
    signal: np.ndarray
    latents: np.ndarray
    graphon: Graphon
    signal_fn: SignalFunction

    def __post_init__(self):
        n = self.graph.n
        if self.signal.shape != (n,) or self.latents.shape != (n,):
            raise DomainError("graph, signal and latents lengths disagree")

    @property
    def n(self) -> int:
        return self.graph.n


def sample_latents(n: int, seed: int) -> np.ndarray:
    """``n`` iid uniform latent features, sorted ascending."""
    if n < 1:
        raise DomainError(f"need at least one latent, got n={n}")
    rng = np.random.default_rng(seed)
    return np.sort(rng.random(n))


def _sample_edges(g: Graphon, latents: np.ndarray, rng: np.random.Generator):
    n = latents.size
    rows_out, cols_out = [], []
    for a in range(0, n, _ROW_BLOCK):
        b = min(a + _ROW_BLOCK, n)
        p = g.outer(latents[a:b], latents)
        upper = np.arange(n)[None, :] > np.arange(a, b)[:, None]
        probs = p[upper]
        if probs.size == 0:
            continue
        hit = rng.random(probs.size) < probs
        r, c = np.nonzero(upper)
        rows_out.append(r[hit] + a)
        cols_out.append(c[hit])
    if not rows_out:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    return np.concatenate(rows_out), np.concatenate(cols_out)


def sample_graph(
    g: Graphon, latents: np.ndarray, seed: int, signal_fn: SignalFunction | None = None
) -> SampledInstance:
    """Draw one Bernoulli edge per unordered pair with probability ``g(u_i, u_j)``."""
    latents = np.asarray(latents, dtype=float)
    if latents.ndim != 1 or latents.size == 0:
        raise DomainError("latents must be a nonempty 1-D array")
    if np.any(np.diff(latents) < 0) or latents[0] < 0 or latents[-1] > 1:
        raise DomainError("latents must be sorted values in [0, 1]")
    signal_fn = signal_fn or SignalFunction()
    rng = np.random.default_rng(seed)
    rows, cols = _sample_edges(g, latents, rng)
    graph = SparseGraph.from_edges(latents.size, rows, cols)
    return SampledInstance(graph, signal_fn(latents), latents, g, signal_fn)


def downsample(inst: SampledInstance, n: int, mode: str = "induced", seed: int = 0) -> SampledInstance:
    """Produce an ``n``-node graph sharing the graphon of ``inst``."""
    big_n = inst.n
    if not 1 <= n <= big_n:
        raise DomainError(f"downsample size must satisfy 1 <= n <= {big_n}, got {n}")
    if mode == "induced":
        rng = np.random.default_rng(seed)
        # A permutation prefix is a uniform subset; equal seeds give nested subsets.
        keep = np.sort(rng.permutation(big_n)[:n])
        sub = inst.graph.adjacency(np.int8)[keep][:, keep].tocsr()
        sub.sort_indices()
        graph = SparseGraph(n, sub.indptr.astype(np.int64), sub.indices.astype(np.int64))
        return SampledInstance(
            graph, inst.signal[keep].copy(), inst.latents[keep].copy(), inst.graphon, inst.signal_fn
        )
    if mode == "resample":
        s_lat, s_edge = np.random.SeedSequence(seed).generate_state(2, dtype=np.uint64)
        latents = sample_latents(n, int(s_lat))
        return sample_graph(inst.graphon, latents, int(s_edge), inst.signal_fn)
    raise DomainError(f"unknown downsample mode {mode!r}; expected one of {DOWNSAMPLE_MODES}")


def empirical_density(graph: SparseGraph) -> float:
    """``2m / (n (n - 1))``."""
    if graph.n < 2:
        raise DomainError(f"empirical density needs n >= 2, got {graph.n}")
    return 2.0 * graph.m / (graph.n * (graph.n - 1))
