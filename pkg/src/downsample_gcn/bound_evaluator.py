"""Transferability bounds, graphon spectra and Monte Carlo checks of the sampling lemmas.

Bound constants follow the integral reading of the kernel norms:
``L1 = int W'`` and ``L2sq = int W'^2`` over ``[0, t_N]^2``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, fields

import numpy as np

from .continuous_forms import (
    graphon_cell_moments,
    induce_signal,
    l2_distance_1d,
    signal_cell_moments,
    step_graphon_distance,
    step_signal_distance,
)
from .errors import DomainError, NumericalError
from .gcn_engine import GcnModel, filter_lipschitz, filter_response, graph_convolve, make_shift, random_init
from .graph_sampler import downsample, sample_graph, sample_latents
from .kernel_model import (
    DEFAULT_QUAD_POINTS,
    Graphon,
    Kernel,
    ScaleFunction,
    SignalFunction,
    calibrate_cd,
    kernel_l1,
    kernel_l2sq,
)

__all__ = [
    "BoundInputs",
    "SpectrumEstimate",
    "CheckRow",
    "graphon_spectrum",
    "delta_h",
    "network_constant",
    "theorem1_bound",
    "theorem2_bound",
    "model_filter_constants",
    "check_lemma2",
    "check_lemma3",
    "check_lemma4",
    "check_order_statistics",
    "check_theorem2",
    "write_report_csv",
    "format_report",
    "L1L2_READINGS",
]

L1L2_READINGS = ("integral", "norm")
DEFAULT_SPECTRUM_M = 512


@dataclass(frozen=True)
class BoundInputs:
    N: int
    n: int
    d: float
    t_N: float
    L1: float
    L2sq: float
    A_Rplus: float
    A_s: float
    A_h: float
    C_m: float
    delta_h: float

    def validate(self) -> None:
        for f in fields(self):
            v = getattr(self, f.name)
            if not (v >= 0 and math.isfinite(v)):
                raise DomainError(f"bound input {f.name} must be finite and nonnegative, got {v}")
        if self.n > self.N or self.n < 1:
            raise DomainError(f"need 1 <= n <= N, got n={self.n}, N={self.N}")
        if self.L1 == 0:
            raise DomainError("L1 = 0: the kernel carries no mass")
        if self.d == 0:
            raise DomainError("average degree d = 0")
        if self.L2sq > self.L1 * (1 + 1e-12):
            raise DomainError(f"L2sq={self.L2sq} exceeds L1={self.L1}")


@dataclass(frozen=True, eq=False)
class SpectrumEstimate:
    m: int
    eigenvalues: np.ndarray

    def signed(self, count: int) -> tuple[np.ndarray, np.ndarray]:
        """Positive eigenvalues in decreasing order and negative ones in
        increasing order, each padded with zeros to ``count`` entries."""
        ev = self.eigenvalues
        pos = np.sort(ev[ev > 0])[::-1][:count]
        neg = np.sort(ev[ev < 0])[:count]
        return (np.pad(pos, (0, count - pos.size)), np.pad(neg, (0, count - neg.size)))

    @property
    def radius(self) -> float:
        return float(abs(self.eigenvalues[0])) if self.eigenvalues.size else 0.0


@dataclass(frozen=True)
class CheckRow:
    check: str
    N: int
    n: int
    trials: int
    empirical_mean: float
    bound: float
    passed: bool


def _discretize(g: Graphon, m: int, scale: float) -> np.ndarray:
    mid = (np.arange(m) + 0.5) / m
    # Continuous formula on the diagonal: the measure-zero line is ignored.
    return g.outer(mid, mid, zero_diagonal=False) / (m * scale)


def graphon_spectrum(g: Graphon, m: int = DEFAULT_SPECTRUM_M, scale: float = 1.0) -> SpectrumEstimate:
    """Eigenvalues of the m x m midpoint discretization of ``g / scale``."""
    if m < 16:
        raise DomainError(f"spectrum grid needs m >= 16, got {m}")
    M = _discretize(g, m, scale)
    try:
        ev = np.linalg.eigvalsh(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed for m={m}, t={g.t}, c_d={g.kernel.c_d}: {exc}") from exc
    order = np.argsort(-np.abs(ev), kind="stable")
    return SpectrumEstimate(m, ev[order])


def delta_h(taps, spectrum: SpectrumEstimate | np.ndarray) -> float:
    """``min_k max_i |h(lambda_i) - k|``, attained at the midrange of the response."""
    lam = spectrum.eigenvalues if isinstance(spectrum, SpectrumEstimate) else np.asarray(spectrum)
    if lam.size == 0:
        raise DomainError("delta_h needs a nonempty spectrum")
    resp = filter_response(taps, lam)
    return float(resp.max() - resp.min()) / 2.0


def network_constant(L: int, F: int, norm_X: float) -> float:
    """``C_m = 2 L F^(L-1) ||X||``."""
    return 2.0 * L * F ** (L - 1) * norm_X


def model_filter_constants(model: GcnModel, spectrum: SpectrumEstimate,
                           spectral_radius: float) -> tuple[float, float]:
    """Max filter Lipschitz constant and max Delta h over every filter of ``model``."""
    a_h = 0.0
    dh = 0.0
    for taps in model.filters():
        a_h = max(a_h, filter_lipschitz(taps, (-spectral_radius, spectral_radius)))
        dh = max(dh, delta_h(taps, spectrum))
    return a_h, dh


def _one_minus_ratio(b: BoundInputs, reading: str) -> float:
    if reading == "integral":
        val = 1.0 - b.L2sq / b.L1
    elif reading == "norm":
        # Both constants read as the L2 norm of the kernel on [0, t_N]^2.
        norm = math.sqrt(b.L2sq)
        val = 1.0 - norm * norm / norm
    else:
        raise DomainError(f"unknown L1/L2 reading {reading!r}; expected one of {L1L2_READINGS}")
    if val < -1e-12:
        raise DomainError(f"1 - L2^2/L1 = {val} is negative under the {reading!r} reading")
    return max(val, 0.0)


def theorem1_bound(b: BoundInputs, reading: str = "integral") -> tuple[float, tuple[float, float, float]]:
    """Right-hand side of the downsampling transferability bound.

    Returns the total and the three additive terms (graph term, signal term,
    frequency-response term).
    """
    b.validate()
    N, n, d = b.N, b.n, b.d
    graph_term = b.C_m * b.A_h * (
        math.sqrt(_one_minus_ratio(b, reading)) * math.sqrt(N / d)
        + b.A_Rplus / math.sqrt(6.0) * (b.t_N * math.sqrt(N) / d) * (1.0 + math.sqrt(N / n))
    )
    signal_term = b.A_s / math.sqrt(6.0) * (1.0 / math.sqrt(N) + 1.0 / math.sqrt(n))
    response_term = 2.0 * b.C_m * b.delta_h
    return graph_term + signal_term + response_term, (graph_term, signal_term, response_term)


def theorem2_bound(b: BoundInputs, norm_X: float) -> float:
    """Bound on the expected distance between single-filter outputs ``h(S/N) x``."""
    b.validate()
    root6 = math.sqrt(6.0)
    graph = (
        math.sqrt(max(b.L1 - b.L2sq, 0.0)) / b.t_N
        + b.A_Rplus * b.t_N / (root6 * math.sqrt(b.N))
        + b.A_Rplus * b.t_N / (root6 * math.sqrt(b.n))
    )
    return (
        2.0 * b.A_h * norm_X * graph
        + b.A_s / root6 * (1.0 / math.sqrt(b.N) + 1.0 / math.sqrt(b.n))
        + 4.0 * b.delta_h * norm_X
    )


def _trial_seed(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence([seed, *key]).generate_state(1, dtype=np.uint64)[0])


def check_lemma2(X: SignalFunction, N_list, trials: int = 200, seed: int = 0,
                 refinement: int = 16) -> list[CheckRow]:
    """Mean distance between the induced sampled signal and X, against ``A_s / sqrt(6N)``."""
    if trials < 30:
        raise DomainError("lemma checks need at least 30 trials")
    rows = []
    for N in N_list:
        moments = signal_cell_moments(X, N, refinement)
        dist = [
            step_signal_distance(X(sample_latents(N, _trial_seed(seed, 2, N, k))), moments)
            for k in range(trials)
        ]
        mean = float(np.mean(dist))
        bound = X.lipschitz_As / math.sqrt(6.0 * N)
        rows.append(CheckRow("lemma2", N, N, trials, mean, bound, mean <= bound))
    return rows


def lemma3_bound(g: Graphon, N: int, quad_points: int = DEFAULT_QUAD_POINTS) -> tuple[float, float]:
    """Return the two terms ``sqrt(L1 - L2^2)/t_N`` and ``2 A t_N / sqrt(6N)``."""
    L1 = kernel_l1(g.kernel, g.t, quad_points)
    L2sq = kernel_l2sq(g.kernel, g.t, quad_points)
    first = math.sqrt(max(L1 - L2sq, 0.0)) / g.t
    second = 2.0 * g.kernel.lipschitz_A * g.t / math.sqrt(6.0 * N)
    return first, second


def check_lemma3(graphon_for, N_list, trials: int = 100, seed: int = 0,
                 refinement: int = 8, quad_points: int = DEFAULT_QUAD_POINTS) -> list[CheckRow]:
    """Mean distance between the induced sampled graph and ``W_N``.

    ``graphon_for`` is a :class:`Graphon` (used for every N) or a callable
    mapping N to the size-N graphon.
    """
    if trials < 30:
        raise DomainError("lemma checks need at least 30 trials")
    rows = []
    for N in N_list:
        g = graphon_for if isinstance(graphon_for, Graphon) else graphon_for(N)
        moments = graphon_cell_moments(g, N, refinement)
        dist = []
        for k in range(trials):
            lat = sample_latents(N, _trial_seed(seed, 3, N, k, 0))
            inst = sample_graph(g, lat, _trial_seed(seed, 3, N, k, 1))
            dist.append(step_graphon_distance(inst.graph, moments))
        mean = float(np.mean(dist))
        bound = sum(lemma3_bound(g, N, quad_points))
        rows.append(CheckRow("lemma3", N, N, trials, mean, bound, mean <= bound))
    return rows


def check_lemma4(g1: Graphon, g2: Graphon, m: int = 256, count: int = 10) -> list[CheckRow]:
    """Sign-ordered eigenvalue gaps against the L2 distance of the discretized graphons."""
    M1 = _discretize(g1, m, 1.0)
    M2 = _discretize(g2, m, 1.0)
    # Frobenius norm of M = W/m equals the L2 norm of the step graphon.
    hs = float(np.linalg.norm(M1 - M2))
    s1 = SpectrumEstimate(m, np.linalg.eigvalsh(M1))
    s2 = SpectrumEstimate(m, np.linalg.eigvalsh(M2))
    (p1, n1), (p2, n2) = s1.signed(count), s2.signed(count)
    rows = []
    for i in range(count):
        for sign, gap in (("+", abs(p1[i] - p2[i])), ("-", abs(n1[i] - n2[i]))):
            rows.append(CheckRow(f"lemma4{sign}{i + 1}", m, m, 1, float(gap), hs, gap <= hs * (1 + 1e-12)))
    return rows


def check_order_statistics(n: int = 10_000, trials: int = 200, seed: int = 0,
                           indices=None, n_se: float = 4.0) -> list[CheckRow]:
    """First and second moments of sorted uniforms against Beta(i, n-i+1).

    ``empirical_mean`` holds the absolute deviation from the exact moment and
    ``bound`` holds ``n_se`` standard errors.
    """
    if indices is None:
        indices = (1, n // 2, n)
    idx = np.asarray(indices) - 1
    samples = np.empty((trials, idx.size))
    for k in range(trials):
        samples[k] = sample_latents(n, _trial_seed(seed, 4, n, k))[idx]
    rows = []
    for col, i in enumerate(indices):
        u = samples[:, col]
        for name, vals, exact in (
            ("order_mean", u, i / (n + 1)),
            ("order_second", u ** 2, (i * i + i) / ((n + 1) * (n + 2))),
        ):
            dev = abs(float(vals.mean()) - exact)
            tol = n_se * float(vals.std(ddof=1)) / math.sqrt(trials)
            rows.append(CheckRow(f"{name}[{i}]", n, i, trials, dev, tol, dev <= tol))
    return rows


def check_theorem2(base: Kernel = Kernel(), scale: ScaleFunction = ScaleFunction(),
                   X: SignalFunction = SignalFunction(), N: int = 1024, n_list=(128, 256),
                   d: float = 40.0, trials: int = 50, seed: int = 0, K: int = 4,
                   mode: str = "induced", spectrum_m: int = DEFAULT_SPECTRUM_M,
                   quad_points: int = DEFAULT_QUAD_POINTS) -> list[CheckRow]:
    """Single random non-amplifying filter applied as ``h(S_N/N) x_N`` and ``h(S_n/n) x_n``.

    The filter is non-amplifying on [-1, 1], which contains the spectrum of
    every ``S/n`` (its norm is at most max degree / n < 1).
    """
    c_d = calibrate_cd(base, scale, N, d, quad_points)
    kernel = base.with_cd(c_d)
    g = Graphon(kernel, scale(N))
    taps = random_init(1, 1, K, _trial_seed(seed, 5, 0), 1.0).taps[0][0, 0]
    spectrum = graphon_spectrum(g, spectrum_m)
    norm_X = X.l2_norm()
    L1 = kernel_l1(kernel, g.t, quad_points)
    L2sq = kernel_l2sq(kernel, g.t, quad_points)
    a_h = filter_lipschitz(taps, (-1.0, 1.0))
    dh = delta_h(taps, spectrum)
    rows = []
    for n in n_list:
        dist = []
        for k in range(trials):
            s = np.random.SeedSequence([seed, 5, N, n, k]).generate_state(3, dtype=np.uint64)
            big = sample_graph(g, sample_latents(N, int(s[0])), int(s[1]), X)
            small = downsample(big, n, mode, int(s[2]))
            y_big = graph_convolve(taps, make_shift(big.graph, "by_n"), big.signal)
            y_small = graph_convolve(taps, make_shift(small.graph, "by_n"), small.signal)
            dist.append(l2_distance_1d(induce_signal(y_big), induce_signal(y_small)))
        b = BoundInputs(N, n, d, g.t, L1, L2sq, kernel.lipschitz_A, X.lipschitz_As, a_h, 0.0, dh)
        bound = theorem2_bound(b, norm_X)
        mean = float(np.mean(dist))
        rows.append(CheckRow("theorem2", N, n, trials, mean, bound, mean <= bound))
    return rows


REPORT_COLUMNS = ("check", "N", "n", "trials", "empirical_mean", "bound", "pass")


def write_report_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for r in rows:
            w.writerow([r.check, r.N, r.n, r.trials, repr(r.empirical_mean), repr(r.bound),
                        "true" if r.passed else "false"])


def format_report(rows) -> str:
    lines = [f"{'check':<18}{'N':>7}{'n':>7}{'trials':>8}{'empirical':>14}{'bound':>14}  result"]
    for r in rows:
        lines.append(
            f"{r.check:<18}{r.N:>7}{r.n:>7}{r.trials:>8}{r.empirical_mean:>14.6g}{r.bound:>14.6g}  "
            + ("PASS" if r.passed else "FAIL")
        )
    return "\n".join(lines)

