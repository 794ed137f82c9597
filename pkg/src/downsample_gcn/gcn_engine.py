"""Polynomial graph filters and untrained multi-layer GCN forward passes."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, DomainError
from .graph_sampler import SparseGraph

__all__ = [
    "ACTIVATIONS",
    "GcnModel",
    "NormalizedShift",
    "make_shift",
    "graph_convolve",
    "gcn_forward",
    "random_init",
    "filter_response",
    "filter_lipschitz",
    "activation_fn",
]

ACTIVATIONS = ("relu", "tanh")

RESPONSE_GRID = 1024
LIPSCHITZ_GRID = 4096


def activation_fn(name: str):
    if name == "relu":
        return lambda z: np.maximum(z, 0.0)
    if name == "tanh":
        return np.tanh
    raise ConfigError(f"unknown activation {name!r}; expected one of {ACTIVATIONS}")


@dataclass(frozen=True, eq=False)
class GcnModel:
    """Weights of an L-layer GCN.

    ``taps[l]`` has shape ``(F_{l-1}, F_l, K)``: one K-tap filter per
    (input feature, output feature) pair.  Widths are ``1, F, ..., F, 1``.
    """

    L: int
    F: int
    K: int
    taps: tuple
    activation: str = "relu"

    def __post_init__(self):
        if self.L < 1 or self.F < 1 or self.K < 1:
            raise ConfigError("L, F and K must all be positive")
        activation_fn(self.activation)
        if len(self.taps) != self.L:
            raise ConfigError(f"expected {self.L} tap tensors, got {len(self.taps)}")
        for l, t in enumerate(self.taps, start=1):
            want = (self.width(l - 1), self.width(l), self.K)
            if np.shape(t) != want:
                raise ConfigError(f"layer {l} taps have shape {np.shape(t)}, expected {want}")

    def width(self, l: int) -> int:
        return 1 if l in (0, self.L) else self.F

    def filters(self):
        """Iterate over every K-tap filter in the network."""
        for t in self.taps:
            yield from np.asarray(t).reshape(-1, self.K)


@dataclass(frozen=True, eq=False)
class NormalizedShift:
    """Adjacency operator divided by a positive scale, ``S / s``."""

    graph: SparseGraph
    scale: float
    _adj: sp.csr_matrix = field(init=False, repr=False)

    def __post_init__(self):
        if not self.scale > 0:
            raise DomainError(f"shift scale must be positive, got {self.scale}")
        object.__setattr__(self, "_adj", self.graph.adjacency(float))

    @property
    def n(self) -> int:
        return self.graph.n

    def apply(self, x: np.ndarray) -> np.ndarray:
        return (self._adj @ x) / self.scale

    def dense(self) -> np.ndarray:
        return self._adj.toarray() / self.scale


def make_shift(graph: SparseGraph, normalizer: str = "by_n", eps: float | None = None) -> NormalizedShift:
    """``S / n`` (``by_n``) or ``S / (eps * n)`` (``by_eps_n``)."""
    if normalizer == "by_n":
        return NormalizedShift(graph, float(graph.n))
    if normalizer == "by_eps_n":
        if eps is None or not eps > 0:
            raise DomainError(f"by_eps_n normalization needs eps > 0, got {eps}")
        return NormalizedShift(graph, float(eps) * graph.n)
    raise DomainError(f"unknown normalizer {normalizer!r}")


def _check_signal(shift: NormalizedShift, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != shift.n:
        raise DomainError(f"signal length {x.shape[-1]} does not match graph size {shift.n}")
    return x


def graph_convolve(taps, shift: NormalizedShift, x) -> np.ndarray:
    """``sum_k taps[k] (S/s)^k x`` by Horner's rule: K-1 sparse products."""
    taps = np.atleast_1d(np.asarray(taps, dtype=float))
    if taps.ndim != 1 or taps.size == 0:
        raise DomainError("filter taps must be a nonempty 1-D array")
    x = _check_signal(shift, x)
    y = taps[-1] * x
    for h in taps[-2::-1]:
        y = shift.apply(y) + h * x
    return y


def _powers(shift: NormalizedShift, X: np.ndarray, K: int) -> np.ndarray:
    """Stack ``(S/s)^k X`` for k < K; X has shape (features, n)."""
    out = np.empty((K,) + X.shape)
    out[0] = X
    for k in range(1, K):
        out[k] = shift.apply(out[k - 1].T).T
    return out


def gcn_forward(model: GcnModel, shift: NormalizedShift, x) -> np.ndarray:
    """Run the network on one input feature; returns the single output feature."""
    x = _check_signal(shift, x)
    if x.ndim != 1:
        raise ConfigError("GCN input must have exactly one feature")
    sigma = activation_fn(model.activation)
    X = x[None, :]
    for taps in model.taps:
        taps = np.asarray(taps, dtype=float)
        if taps.shape[0] != X.shape[0]:
            raise ConfigError(f"tap tensor expects {taps.shape[0]} input features, got {X.shape[0]}")
        P = _powers(shift, X, model.K)
        Z = np.zeros((taps.shape[1], X.shape[1]))
        for f in range(X.shape[0]):
            Z += taps[f].dot(P[:, f, :])
        X = sigma(Z)
    return X[0]


def filter_response(taps, lambdas) -> np.ndarray:
    """Frequency response ``h(lambda) = sum_k taps[k] lambda^k``."""
    return np.polynomial.polynomial.polyval(np.asarray(lambdas, dtype=float), np.asarray(taps, dtype=float))


def filter_lipschitz(taps, lambda_range: tuple[float, float]) -> float:
    """Max of ``|h'(lambda)|`` on a 4096-point grid over ``lambda_range``."""
    taps = np.atleast_1d(np.asarray(taps, dtype=float))
    if taps.size < 2:
        return 0.0
    grid = np.linspace(lambda_range[0], lambda_range[1], LIPSCHITZ_GRID)
    deriv = np.polynomial.polynomial.polyder(taps)
    return float(np.max(np.abs(np.polynomial.polynomial.polyval(grid, deriv))))


def random_init(L: int, F: int, K: int, seed: int, spectral_radius_est: float = 1.0,
                activation: str = "relu") -> GcnModel:
    """Random non-amplifying filters for an untrained network.

    Each filter is ``h(lam) = sum_k a_k (lam / R)^k`` with ``a_k`` iid
    uniform[-1, 1] and ``R = spectral_radius_est``; a filter whose peak
    ``|h|`` on a 1024-point grid of ``[-R, R]`` exceeds 1 is divided by that
    peak.  Drawing in the ``lam / R`` basis keeps every power of the shift
    relevant on the spectral range (monomial-basis draws with large R leave
    only the top power after rescaling).
    """
    if L < 1 or F < 1 or K < 1:
        raise ConfigError("L, F and K must all be positive")
    if not spectral_radius_est > 0:
        raise DomainError("spectral_radius_est must be positive")
    rng = np.random.default_rng(seed)
    R = float(spectral_radius_est)
    grid = np.linspace(-R, R, RESPONSE_GRID)
    basis = R ** -np.arange(K, dtype=float)
    widths = [1] + [F] * (L - 1) + [1]
    layers = []
    for l in range(1, L + 1):
        t = rng.uniform(-1.0, 1.0, size=(widths[l - 1], widths[l], K)) * basis
        flat = t.reshape(-1, K)
        for row in flat:
            peak = float(np.max(np.abs(filter_response(row, grid))))
            if peak > 1.0:
                # Nudge below 1 so rounding cannot push the grid peak over.
                row /= peak * (1.0 + 1e-12)
        layers.append(flat.reshape(t.shape))
    return GcnModel(L, F, K, tuple(layers), activation)
