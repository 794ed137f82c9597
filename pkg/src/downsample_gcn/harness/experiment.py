"""Transferability sweeps: sample, downsample, run one shared GCN, compare.

Seeding: a trial of cell (N, d) uses the seed ``hash(master, N, trial)``.
That seed fixes the large graph's latents, its edges and the node
permutation whose prefixes give the downsampled subsets, so within a trial
the graphs for every n are nested and the graphs for every d share their
random draws (common random numbers).  Results depend only on the cell key,
never on thread scheduling.
"""
from __future__ import annotations

import csv
import datetime as _dt
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..bound_evaluator import (
    BoundInputs,
    graphon_spectrum,
    model_filter_constants,
    network_constant,
    theorem1_bound,
)
from ..continuous_forms import induce_signal, l2_distance_1d, l2_norm_1d
from ..errors import DomainError
from ..gcn_engine import GcnModel, NormalizedShift, gcn_forward, random_init
from ..graph_sampler import SampledInstance, downsample, empirical_density, sample_graph, sample_latents
from ..kernel_model import (
    Graphon,
    Kernel,
    ScaleFunction,
    SignalFunction,
    avg_degree,
    calibrate_cd,
    edge_density,
    graphon_at,
    kernel_l1,
    kernel_l2sq,
)
from .config import ExperimentConfig, format_config

__all__ = [
    "TrialResult",
    "SweepSummary",
    "TrendCheck",
    "SweepReport",
    "CellModel",
    "SweepContext",
    "prepare_context",
    "trial_seed",
    "run_trial",
    "run_group",
    "run_sweep",
    "run_scale_sweep",
    "run_degree_sweep",
    "cell_bound",
    "summarize",
    "evaluate_trends",
    "write_results_csv",
    "write_summary_csv",
    "RESULTS_HEADER",
    "SUMMARY_HEADER",
]

RESULTS_HEADER = ("N", "n", "d_target", "c_d", "trial", "seed", "e_r", "degenerate", "wall_ms")
SUMMARY_HEADER = ("N", "n", "d_target", "mean_er", "sd_er", "count", "bound_rhs")
CHECKS_HEADER = ("check", "group", "n", "status", "detail")


@dataclass(frozen=True)
class TrialResult:
    N: int
    n: int
    d_target: float
    c_d: float
    trial: int
    seed: int
    e_r: float
    degenerate: bool
    wall_ms: float
    abs_err: float = math.nan
    norm_YN: float = math.nan
    error: str = ""


@dataclass(frozen=True)
class SweepSummary:
    N: int
    n: int
    d_target: float
    c_d: float
    mean_er: float
    sd_er: float
    count: int
    bound_rhs: float
    mean_abs_err: float
    bound_terms: tuple = ()

    @property
    def se_er(self) -> float:
        return self.sd_er / math.sqrt(self.count) if self.count > 0 else math.nan


@dataclass(frozen=True)
class TrendCheck:
    check: str
    group: str
    n: int
    status: str  # "pass", "warn" or "fail"
    detail: str


@dataclass(frozen=True, eq=False)
class CellModel:
    """Everything about one (N, d) model that does not depend on the trial."""

    N: int
    d_target: float
    c_d: float
    graphon: Graphon
    eps_N: float
    degree: float
    L1: float
    L2sq: float
    spectrum: object  # SpectrumEstimate of W_N / eps(N)


@dataclass(eq=False)
class SweepContext:
    cfg: ExperimentConfig
    cells: dict
    model: GcnModel
    radius: float
    signal_fn: SignalFunction
    scale: ScaleFunction
    small_eps: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)


@dataclass(eq=False)
class SweepReport:
    kind: str
    trials: list
    summaries: list
    checks: list
    context: SweepContext
    out_path: str | None = None

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)


def trial_seed(master: int, N: int, trial: int) -> int:
    return int(np.random.SeedSequence([master, N, trial]).generate_state(1, dtype=np.uint64)[0])


def _signal(cfg: ExperimentConfig) -> SignalFunction:
    return SignalFunction(cfg.signal, cfg.signal_freq, cfg.signal_value)


def _cell_model(cfg: ExperimentConfig, scale: ScaleFunction, N: int, d: float) -> CellModel:
    base = Kernel(cfg.kernel)
    c_d = cfg.c_d if cfg.c_d is not None else calibrate_cd(base, scale, N, d, cfg.quad_points)
    kernel = base.with_cd(c_d)
    g = graphon_at(kernel, scale, N)
    eps = edge_density(g, cfg.quad_points)
    if eps <= 0:
        raise DomainError(f"model for N={N}, d={d} has zero edge density")
    return CellModel(
        N=N,
        d_target=float(d),
        c_d=float(c_d),
        graphon=g,
        eps_N=eps,
        degree=avg_degree(g, N, cfg.quad_points),
        L1=kernel_l1(kernel, g.t, cfg.quad_points),
        L2sq=kernel_l2sq(kernel, g.t, cfg.quad_points),
        spectrum=graphon_spectrum(g, cfg.spectrum_m, eps),
    )


def prepare_context(cfg: ExperimentConfig, pairs) -> SweepContext:
    """Calibrate every (N, d) model and draw the single GCN shared by the sweep.

    Filters are made non-amplifying on ``[-R, R]`` with ``R`` the largest
    spectral radius of ``W_N / eps(N)`` over the sweep, times
    ``cfg.radius_factor`` to leave room for sampling fluctuations.
    """
    scale = ScaleFunction(cfg.scale_exponent)
    cells = {(N, float(d)): _cell_model(cfg, scale, N, d) for N, d in pairs}
    radius = cfg.radius_factor * max(c.spectrum.radius for c in cells.values())
    if not radius > 0:
        raise DomainError("every model in the sweep has an empty spectrum")
    model = random_init(cfg.layers, cfg.features, cfg.taps, cfg.weight_seed, radius, cfg.activation)
    ctx = SweepContext(cfg, cells, model, radius, _signal(cfg), scale)
    if cfg.normalizer == "eps_of_n":
        for cell in cells.values():
            for n in cfg.n_list:
                ctx.small_eps[(cell.N, cell.d_target, n)] = _size_n_density(ctx, cell, n)
    return ctx


def _size_n_density(ctx: SweepContext, cell: CellModel, n: int) -> float:
    g_n = graphon_at(cell.graphon.kernel, ctx.scale, n)
    return edge_density(g_n, ctx.cfg.quad_points)


def _shift_scale(ctx: SweepContext, cell: CellModel, inst: SampledInstance, large: bool) -> float:
    norm = ctx.cfg.normalizer
    if norm == "eps_N" or (norm == "eps_of_n" and large):
        eps = cell.eps_N
    elif norm == "eps_of_n":
        key = (cell.N, cell.d_target, inst.n)
        eps = ctx.small_eps.get(key)
        if eps is None:
            eps = _size_n_density(ctx, cell, inst.n)
    else:
        eps = empirical_density(inst.graph)
    if not eps > 0:
        raise DomainError(f"normalizer {norm!r} gives zero density for a graph with n={inst.n}")
    return eps * inst.n


def _output(ctx: SweepContext, cell: CellModel, inst: SampledInstance, large: bool) -> np.ndarray:
    shift = NormalizedShift(inst.graph, _shift_scale(ctx, cell, inst, large))
    return gcn_forward(ctx.model, shift, inst.signal)


def run_group(ctx: SweepContext, N: int, d: float, trial: int, n_list, seed: int | None = None) -> list:
    """All n of one (N, d, trial): one large graph, one permutation, nested subsets."""
    cfg = ctx.cfg
    cell = ctx.cells[(N, float(d))]
    if seed is None:
        seed = trial_seed(cfg.seed, N, trial)
    s_lat, s_edge, s_sub = np.random.SeedSequence(seed).generate_state(3, dtype=np.uint64)

    def failed(n, msg, ms=0.0):
        return TrialResult(N, n, cell.d_target, cell.c_d, trial, seed, math.nan, True, ms, error=msg)

    t0 = time.perf_counter()
    try:
        big = sample_graph(cell.graphon, sample_latents(N, int(s_lat)), int(s_edge), ctx.signal_fn)
        y_big = induce_signal(_output(ctx, cell, big, True))
    except (DomainError, ArithmeticError) as exc:
        return [failed(n, str(exc)) for n in n_list]
    big_ms = (time.perf_counter() - t0) * 1e3
    norm = l2_norm_1d(y_big)

    out = []
    for n in n_list:
        t1 = time.perf_counter()
        try:
            small = downsample(big, n, cfg.downsample_mode, int(s_sub))
            y_small = induce_signal(_output(ctx, cell, small, False))
        except (DomainError, ArithmeticError) as exc:
            out.append(failed(n, str(exc)))
            continue
        dist = l2_distance_1d(y_big, y_small)
        ms = big_ms + (time.perf_counter() - t1) * 1e3
        if norm == 0.0:
            out.append(TrialResult(N, n, cell.d_target, cell.c_d, trial, seed, math.nan, True, ms,
                                   dist, 0.0, "large-graph output has zero norm"))
        else:
            out.append(TrialResult(N, n, cell.d_target, cell.c_d, trial, seed, dist / norm, False, ms,
                                   dist, norm))
    return out


def run_trial(cfg: ExperimentConfig, N: int, n: int, seed: int, d_target: float | None = None,
              context: SweepContext | None = None, trial: int = 0) -> TrialResult:
    """One (N, n) comparison; deterministic given ``(cfg, seed)`` and the shared model.

    Without ``context`` a model is prepared for this single (N, d) cell; sweeps
    pass their own context so every cell uses the same weights.
    """
    d = float(cfg.target_d if d_target is None else d_target)
    if context is None:
        context = prepare_context(cfg, [(N, d)])
    return run_group(context, N, d, trial, [n], seed)[0]


def cell_bound(ctx: SweepContext, cell: CellModel, n: int) -> tuple[float, tuple]:
    key = (cell.N, cell.d_target, n)
    if key not in ctx.bounds:
        cfg = ctx.cfg
        a_h, dh = model_filter_constants(ctx.model, cell.spectrum, ctx.radius)
        c_m = network_constant(cfg.layers, cfg.features, ctx.signal_fn.l2_norm())
        b = BoundInputs(cell.N, n, cell.degree, cell.graphon.t, cell.L1, cell.L2sq,
                        cell.graphon.kernel.lipschitz_A, ctx.signal_fn.lipschitz_As, a_h, c_m, dh)
        ctx.bounds[key] = theorem1_bound(b, cfg.l1l2_reading)
    return ctx.bounds[key]


def summarize(ctx: SweepContext, trials) -> list:
    groups: dict = {}
    for r in trials:
        groups.setdefault((r.N, r.d_target, r.n), []).append(r)
    out = []
    for (N, d, n), rows in groups.items():
        ok = [r for r in rows if not r.degenerate]
        er = np.array([r.e_r for r in ok])
        ab = np.array([r.abs_err for r in ok])
        cell = ctx.cells[(N, d)]
        total, terms = cell_bound(ctx, cell, n)
        out.append(SweepSummary(
            N=N, n=n, d_target=d, c_d=cell.c_d,
            mean_er=float(er.mean()) if er.size else math.nan,
            sd_er=float(er.std(ddof=1)) if er.size > 1 else 0.0,
            count=len(ok),
            bound_rhs=total,
            mean_abs_err=float(ab.mean()) if ab.size else math.nan,
            bound_terms=terms,
        ))
    return out


def _by_group(summaries, key):
    curves: dict = {}
    for s in summaries:
        curves.setdefault(getattr(s, key), {})[s.n] = s
    return curves


def evaluate_trends(kind: str, summaries) -> list:
    """Monotonicity in n, cross-group ordering and bound dominance.

    Ordering uses a one-standard-error allowance on each side: a reversal
    inside it is a warning, beyond it a failure.
    """
    key = "N" if kind == "scale" else "d_target"
    curves = _by_group(summaries, key)
    checks = []
    for g, curve in sorted(curves.items()):
        ns = sorted(curve)
        for lo, hi in zip(ns, ns[1:]):
            a, b = curve[lo].mean_er, curve[hi].mean_er
            ok = a > b
            checks.append(TrendCheck("decreasing_in_n", f"{key}={g:g}", hi,
                                     "pass" if ok else "fail", f"{a:.6g} -> {b:.6g}"))
    # Errors should grow with N and shrink with d.
    order = sorted(curves) if kind == "scale" else sorted(curves, reverse=True)
    for small_g, big_g in zip(order, order[1:]):
        for n in sorted(set(curves[small_g]) & set(curves[big_g])):
            lo, hi = curves[small_g][n], curves[big_g][n]
            if not (lo.count and hi.count):
                continue
            if hi.mean_er >= lo.mean_er:
                status = "pass"
            elif hi.mean_er + hi.se_er >= lo.mean_er - lo.se_er:
                status = "warn"
            else:
                status = "fail"
            checks.append(TrendCheck("group_ordering", f"{key}={big_g:g} vs {small_g:g}", n, status,
                                     f"{hi.mean_er:.6g}+-{hi.se_er:.3g} vs {lo.mean_er:.6g}+-{lo.se_er:.3g}"))
    for s in summaries:
        ok = s.count > 0 and s.mean_abs_err <= s.bound_rhs
        checks.append(TrendCheck("bound_dominance", f"N={s.N} d={s.d_target:g}", s.n,
                                 "pass" if ok else "fail", f"{s.mean_abs_err:.6g} <= {s.bound_rhs:.6g}"))
    return checks


def run_sweep(kind: str, cfg: ExperimentConfig, pairs, out_dir: str | None = None,
              write: bool = True, progress=None) -> SweepReport:
    ctx = prepare_context(cfg, pairs)
    jobs = [(N, float(d), k) for N, d in pairs for k in range(cfg.trials)]
    slots: list = [None] * len(jobs)

    def work(i):
        N, d, k = jobs[i]
        n_list = [n for n in cfg.n_list if n <= N]
        slots[i] = run_group(ctx, N, d, k, n_list)
        if progress:
            progress(i, len(jobs))

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            list(pool.map(work, range(len(jobs))))
    else:
        for i in range(len(jobs)):
            work(i)
    pair_rank = {(N, float(d)): i for i, (N, d) in enumerate(pairs)}
    trials = sorted((r for s in slots for r in s),
                    key=lambda r: (pair_rank[(r.N, r.d_target)], r.n, r.trial))
    summaries = summarize(ctx, trials)
    summaries.sort(key=lambda s: (pair_rank[(s.N, s.d_target)], s.n))
    report = SweepReport(kind, trials, summaries, evaluate_trends(kind, summaries), ctx)
    if write:
        report.out_path = write_outputs(report, out_dir or cfg.out_dir)
    return report


def run_scale_sweep(cfg: ExperimentConfig, out_dir: str | None = None, write: bool = True,
                    progress=None) -> SweepReport:
    pairs = [(N, cfg.target_d) for N in cfg.N_list]
    return run_sweep("scale", cfg, pairs, out_dir, write, progress)


def run_degree_sweep(cfg: ExperimentConfig, out_dir: str | None = None, write: bool = True,
                     progress=None) -> SweepReport:
    pairs = [(cfg.degree_N, d) for d in cfg.d_list]
    return run_sweep("degree", cfg, pairs, out_dir, write, progress)


def _fmt(v: float) -> str:
    return repr(float(v))


def write_results_csv(path, trials, record_wall_time: bool = False) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULTS_HEADER)
        for r in trials:
            wall = f"{r.wall_ms:.3f}" if record_wall_time else "0"
            w.writerow([r.N, r.n, _fmt(r.d_target), _fmt(r.c_d), r.trial, r.seed, _fmt(r.e_r),
                        "true" if r.degenerate else "false", wall])


def write_summary_csv(path, summaries) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        for s in summaries:
            w.writerow([s.N, s.n, _fmt(s.d_target), _fmt(s.mean_er), _fmt(s.sd_er), s.count,
                        _fmt(s.bound_rhs)])


def read_summary_csv(path) -> list:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != SUMMARY_HEADER:
            raise DomainError(f"{path}: unexpected summary header {reader.fieldnames}")
        for row in reader:
            out.append(SweepSummary(int(row["N"]), int(row["n"]), float(row["d_target"]), math.nan,
                                    float(row["mean_er"]), float(row["sd_er"]), int(row["count"]),
                                    float(row["bound_rhs"]), math.nan))
    return out


def _write_checks(path, checks) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CHECKS_HEADER)
        for c in checks:
            w.writerow([c.check, c.group, c.n, c.status, c.detail])


def _write_timings(path, trials) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("N", "n", "d_target", "trial", "wall_ms"))
        for r in trials:
            w.writerow([r.N, r.n, _fmt(r.d_target), r.trial, f"{r.wall_ms:.3f}"])


def _run_dir(root: str, kind: str) -> str:
    stamp = _dt.datetime.now(_dt.timezone.utc).strftime("%Y%m%dT%H%M%SZ")
    base = os.path.join(root, kind, stamp)
    path, k = base, 1
    while os.path.exists(path):
        k += 1
        path = f"{base}-{k}"
    os.makedirs(path)
    return path


def _echo(report: SweepReport) -> str:
    ctx = report.context
    lines = [format_config(ctx.cfg), "# resolved by the harness\n"]
    lines.append(f"# sweep = {report.kind}\n")
    lines.append(f"# filter_range_R = {ctx.radius!r}\n")
    for (N, d), cell in ctx.cells.items():
        lines.append(f"# cell N={N} d={d:g}: c_d={cell.c_d!r} eps_N={cell.eps_N!r} "
                     f"degree={cell.degree!r} spectral_radius={cell.spectrum.radius!r}\n")
    lines.append("# one GCN shared by all cells; weights fixed by weight_seed, not resampled per trial\n")
    lines.append("# trial seed = hash(seed, N, trial); shared across n and d within a trial\n")
    return "".join(lines)


def write_outputs(report: SweepReport, root: str) -> str:
    from .plot import emit_plot

    path = _run_dir(root, report.kind)
    cfg = report.context.cfg
    write_results_csv(os.path.join(path, "results.csv"), report.trials, cfg.record_wall_time)
    write_summary_csv(os.path.join(path, "summary.csv"), report.summaries)
    _write_checks(os.path.join(path, "checks.csv"), report.checks)
    _write_timings(os.path.join(path, "timings.csv"), report.trials)
    with open(os.path.join(path, "config.echo"), "w", encoding="utf-8") as fh:
        fh.write(_echo(report))
    usable = [s for s in report.summaries if s.count > 0]
    if usable:
        group = "N" if report.kind == "scale" else "d_target"
        emit_plot(usable, os.path.join(path, "figure.svg"), group_by=group)
    else:
        print("warning: no usable cells; figure.svg not written", file=sys.stderr)
    return path
