"""Sparse random graph model: kernel on R+^2, scale function and signal function.

The size-n graphon is obtained by restricting the (clipped) kernel to
``[0, t_n]^2`` and rescaling to the unit square,
``W_n(u, v) = W'(u * t_n, v * t_n)``.  Density and degree functionals are
integrated with a deterministic tensor-product rule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InfeasibleError

__all__ = [
    "Kernel",
    "ScaleFunction",
    "SignalFunction",
    "Graphon",
    "quadrature_nodes",
    "eval_graphon",
    "edge_density",
    "avg_degree",
    "calibrate_cd",
    "kernel_l1",
    "kernel_l2sq",
    "graphon_at",
]

BASE_KERNELS = ("exp-product", "constant")
SIGNAL_KINDS = ("cos", "constant")

DEFAULT_QUAD_POINTS = 2048
_ROW_CHUNK = 512


@dataclass(frozen=True)
class Kernel:
    """Clipped kernel ``W'(u, v) = min(1, c_d * W(u, v))`` with zero diagonal.

    ``base`` selects ``W``: ``"exp-product"`` is ``exp(-u) exp(-v)``;
    ``"constant"`` is 1 off the diagonal (a dense reference model).
    """

    base: str = "exp-product"
    c_d: float = 1.0

    def __post_init__(self):
        if self.base not in BASE_KERNELS:
            raise DomainError(f"unknown kernel base {self.base!r}; expected one of {BASE_KERNELS}")
        if not (self.c_d >= 0 and math.isfinite(self.c_d)):
            raise DomainError(f"c_d must be a finite nonnegative real, got {self.c_d}")

    @property
    def lipschitz_A(self) -> float:
        # Clipping is 1-Lipschitz, so the base gradient bound times c_d is valid.
        if self.base == "exp-product":
            return float(self.c_d)
        return 0.0

    def with_cd(self, c_d: float) -> "Kernel":
        return Kernel(self.base, float(c_d))

    def __call__(self, x, y):
        """Evaluate the clipped kernel at points of R+^2 (broadcasting)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.base == "exp-product":
            raw = self.c_d * np.exp(-(x + y))
        else:
            raw = np.full(np.broadcast(x, y).shape, float(self.c_d))
        out = np.minimum(raw, 1.0)
        return np.where(x == y, 0.0, out)

    def outer(self, xs, ys, zero_diagonal: bool = True) -> np.ndarray:
        """Matrix ``W'(xs[i], ys[j])`` for 1-D coordinate arrays.

        With ``zero_diagonal=False`` the off-diagonal formula is used on
        ``x == y`` too (the measure-zero line is irrelevant to integrals).
        """
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if self.base == "exp-product":
            m = np.multiply.outer(self.c_d * np.exp(-xs), np.exp(-ys))
            np.minimum(m, 1.0, out=m)
        else:
            m = np.full((xs.size, ys.size), min(float(self.c_d), 1.0))
        if zero_diagonal:
            m[xs[:, None] == ys[None, :]] = 0.0
        return m


@dataclass(frozen=True)
class ScaleFunction:
    """``t_n = n ** exponent``."""

    exponent: float = 0.5

    def __post_init__(self):
        if not (0.0 < self.exponent <= 1.0):
            raise DomainError(f"scale exponent must lie in (0, 1], got {self.exponent}")

    def __call__(self, n) -> float:
        if n < 1:
            raise DomainError(f"scale function is defined for n >= 1, got {n}")
        return float(n) ** self.exponent


@dataclass(frozen=True)
class SignalFunction:
    """Node signal ``X : [0, 1] -> R``.

    ``cos``: ``X(u) = cos(freq * pi * u)``; ``constant``: ``X(u) = value``.
    """

    kind: str = "cos"
    freq: float = 1.0
    value: float = 1.0

    def __post_init__(self):
        if self.kind not in SIGNAL_KINDS:
            raise DomainError(f"unknown signal kind {self.kind!r}; expected one of {SIGNAL_KINDS}")

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "cos":
            return np.cos(self.freq * math.pi * u)
        return np.full(u.shape, float(self.value))

    @property
    def lipschitz_As(self) -> float:
        if self.kind == "cos":
            return abs(self.freq) * math.pi
        return 0.0

    def l2_norm(self, quad_points: int = 4096) -> float:
        x, w = quadrature_nodes(quad_points)
        return math.sqrt(float(np.dot(w, self(x) ** 2)))


@dataclass(frozen=True)
class Graphon:
    """Kernel restricted to ``[0, t]^2`` and rescaled onto the unit square."""

    kernel: Kernel
    t: float

    def __post_init__(self):
        if not (self.t > 0 and math.isfinite(self.t)):
            raise DomainError(f"graphon scale t must be positive, got {self.t}")

    def __call__(self, u, v):
        return self.kernel(np.asarray(u, dtype=float) * self.t, np.asarray(v, dtype=float) * self.t)

    def outer(self, us, vs, zero_diagonal: bool = True) -> np.ndarray:
        return self.kernel.outer(
            np.asarray(us, dtype=float) * self.t, np.asarray(vs, dtype=float) * self.t, zero_diagonal
        )


def graphon_at(kernel: Kernel, scale: ScaleFunction, n: int) -> Graphon:
    """The size-``n`` graphon ``W_n`` of the model."""
    return Graphon(kernel, scale(n))


def quadrature_nodes(quad_points: int, rule: str = "gauss2") -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of a composite rule on [0, 1] with ``quad_points`` nodes.

    ``gauss2`` uses two Gauss-Legendre nodes per panel (``quad_points`` must
    be even); ``midpoint`` uses one node per cell.
    """
    if quad_points < 1:
        raise DomainError("quad_points must be positive")
    if rule == "midpoint":
        x = (np.arange(quad_points) + 0.5) / quad_points
        return x, np.full(quad_points, 1.0 / quad_points)
    if rule == "gauss2":
        if quad_points % 2:
            raise DomainError("gauss2 quadrature needs an even number of nodes")
        panels = quad_points // 2
        h = 1.0 / panels
        offs = 0.5 / math.sqrt(3.0)
        left = np.arange(panels) * h
        x = np.empty(quad_points)
        x[0::2] = left + (0.5 - offs) * h
        x[1::2] = left + (0.5 + offs) * h
        return x, np.full(quad_points, h / 2.0)
    raise DomainError(f"unknown quadrature rule {rule!r}")


def _unit_square_moments(g: Graphon, quad_points: int, rule: str = "gauss2") -> tuple[float, float]:
    """Return (integral of W_n, integral of W_n^2) over the unit square."""
    x, w = quadrature_nodes(quad_points, rule)
    s1 = 0.0
    s2 = 0.0
    for lo in range(0, x.size, _ROW_CHUNK):
        block = g.outer(x[lo:lo + _ROW_CHUNK], x, zero_diagonal=False)
        wr = w[lo:lo + _ROW_CHUNK]
        s1 += float(wr @ (block @ w))
        s2 += float(wr @ ((block * block) @ w))
    return s1, s2


def eval_graphon(g: Graphon, u: float, v: float) -> float:
    if not (0.0 <= u <= 1.0 and 0.0 <= v <= 1.0):
        raise DomainError(f"graphon arguments must lie in [0, 1], got ({u}, {v})")
    return float(g(u, v))


def edge_density(g: Graphon, quad_points: int = DEFAULT_QUAD_POINTS, rule: str = "gauss2") -> float:
    """Expected edge density: the integral of the graphon over the unit square."""
    if quad_points < 16:
        raise DomainError("edge_density needs quad_points >= 16")
    if g.kernel.c_d == 0:
        return 0.0
    return _unit_square_moments(g, quad_points, rule)[0]


def avg_degree(g: Graphon, n: int, quad_points: int = DEFAULT_QUAD_POINTS) -> float:
    if n < 2:
        raise DomainError(f"avg_degree needs n >= 2, got {n}")
    return (n - 1) * edge_density(g, quad_points)


def kernel_l1(k: Kernel, t: float, quad_points: int = DEFAULT_QUAD_POINTS) -> float:
    """Integral of the clipped kernel over ``[0, t]^2``."""
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    if k.c_d == 0:
        return 0.0
    return t * t * _unit_square_moments(Graphon(k, t), quad_points)[0]


def kernel_l2sq(k: Kernel, t: float, quad_points: int = DEFAULT_QUAD_POINTS) -> float:
    """Integral of the squared clipped kernel over ``[0, t]^2``."""
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    if k.c_d == 0:
        return 0.0
    return t * t * _unit_square_moments(Graphon(k, t), quad_points)[1]


def calibrate_cd(
    base: Kernel,
    scale: ScaleFunction,
    n: int,
    target_d: float,
    quad_points: int = DEFAULT_QUAD_POINTS,
    max_iter: int = 80,
) -> float:
    """Find ``c_d`` so the size-``n`` model has average degree ``target_d``.

    Bisection on ``c_d``; the degree is nondecreasing in ``c_d`` and bounded
    by ``n - 1``.
    """
    if n < 2:
        raise DomainError(f"calibrate_cd needs n >= 2, got {n}")
    if not target_d > 0:
        raise DomainError(f"target degree must be positive, got {target_d}")
    if target_d >= n - 1:
        raise InfeasibleError(f"target degree {target_d} is not below n - 1 = {n - 1}")
    t = scale(n)

    def degree(c):
        return avg_degree(Graphon(base.with_cd(c), t), n, quad_points)

    lo, hi = 0.0, 1.0
    d_hi = degree(hi)
    doublings = 0
    while d_hi < target_d:
        lo, hi = hi, 2.0 * hi
        d_prev, d_hi = d_hi, degree(hi)
        doublings += 1
        # Fully clipped kernel: further growth in c_d cannot raise the degree.
        if doublings > 60 and d_hi - d_prev <= 1e-12 * max(d_hi, 1.0):
            raise InfeasibleError(
                f"target degree {target_d} unreachable; saturated at {d_hi:.6g} for n={n}"
            )
        if doublings > 1100:
            raise InfeasibleError(f"target degree {target_d} not bracketed for n={n}")

    tol = 1e-7 * target_d
    c = hi
    for _ in range(max_iter):
        c = 0.5 * (lo + hi)
        d = degree(c)
        if abs(d - target_d) <= tol:
            break
        if d < target_d:
            lo = c
        else:
            hi = c
    return c
