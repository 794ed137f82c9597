"""Command-line entry point: ``downsample-gcn <command> [options]``.

Exit status: 0 on success, 1 on usage or validation failure, 2 on I/O error.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import bound_evaluator as be
from . import io as dio
from .continuous_forms import induce_signal, l2_norm_1d
from .errors import ConfigError, DegenerateOutputError, DomainError, InfeasibleError, NumericalError
from .gcn_engine import make_shift, gcn_forward, random_init
from .graph_sampler import SampledInstance, downsample, sample_graph, sample_latents
from .harness.config import ExperimentConfig, load_config
from .harness.experiment import (
    cell_bound,
    prepare_context,
    read_summary_csv,
    run_degree_sweep,
    run_scale_sweep,
)
from .harness.plot import emit_plot
from .kernel_model import Graphon, Kernel, ScaleFunction, SignalFunction, calibrate_cd, edge_density, graphon_at

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--config", help="key=value config file (defaults are built in)")
    g.add_argument("--seed", type=_u64, help="master seed (overrides the config)")
    g.add_argument("--out", help="output directory (overrides out_dir)")
    g.add_argument("--threads", type=_positive, help="worker threads (overrides threads)")

    p = _Parser(prog="downsample-gcn", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("generate", parents=[common], help="sample a graph, signal and latents")
    s.add_argument("--N", type=_positive, help="node count (default: first N of the config)")
    s.add_argument("--d", type=float, help="target average degree (default: target_d)")

    s = sub.add_parser("downsample", parents=[common], help="downsample a stored graph")
    s.add_argument("--graph", required=True)
    s.add_argument("--signal", required=True)
    s.add_argument("--latents", required=True)
    s.add_argument("--n", type=_positive, required=True)
    s.add_argument("--mode", choices=("induced", "resample"), help="default: downsample_mode")
    s.add_argument("--d", type=float, help="target degree of the generating model (resample mode)")

    s = sub.add_parser("forward", parents=[common], help="run the GCN on a stored graph")
    s.add_argument("--graph", required=True)
    s.add_argument("--signal", required=True)
    s.add_argument("--model", help="model file; default draws weights from the config")
    s.add_argument("--save-model", help="write the model used to this file")
    s.add_argument("--normalize", choices=("eps_n", "n"), default="eps_n",
                   help="divide S by eps*n (default) or by n")
    s.add_argument("--eps", type=float, help="density for eps_n; default is eps(N) of the config model")
    s.add_argument("--N", type=_positive, help="model size whose density normalizes S (default: graph size)")

    s = sub.add_parser("bound", parents=[common], help="evaluate the transferability bounds")
    s.add_argument("--N", type=_positive, action="append", help="restrict to these N (repeatable)")
    s.add_argument("--n", type=_positive, action="append", help="restrict to these n (repeatable)")

    s = sub.add_parser("check-lemmas", parents=[common], help="Monte Carlo checks of the sampling lemmas")
    s.add_argument("--quick", action="store_true", help="30 trials per check instead of the defaults")
    s.add_argument("--with-theorem2", action="store_true", help="also run the single-filter transfer check")

    s = sub.add_parser("sweep", parents=[common], help="run a transferability sweep")
    s.add_argument("kind", choices=("scale", "degree"))

    s = sub.add_parser("plot", parents=[common], help="plot a summary.csv")
    s.add_argument("--summary", required=True)
    s.add_argument("--group-by", choices=("N", "d_target"), default="N")
    s.add_argument("--output", help="SVG path (default: figure.svg next to the summary)")
    return p


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig().validate()
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.out is not None:
        changes["out_dir"] = args.out
    if args.threads is not None:
        changes["threads"] = args.threads
    return cfg.replace(**changes) if changes else cfg


def _out_dir(cfg: ExperimentConfig, name: str) -> str:
    path = os.path.join(cfg.out_dir, name)
    os.makedirs(path, exist_ok=True)
    return path


def _kernel(cfg: ExperimentConfig, N: int, d: float) -> Kernel:
    base = Kernel(cfg.kernel)
    if cfg.c_d is not None:
        return base.with_cd(cfg.c_d)
    return base.with_cd(calibrate_cd(base, ScaleFunction(cfg.scale_exponent), N, d, cfg.quad_points))


def _signal(cfg: ExperimentConfig) -> SignalFunction:
    return SignalFunction(cfg.signal, cfg.signal_freq, cfg.signal_value)


def cmd_generate(args, cfg) -> int:
    N = args.N or cfg.N_list[0]
    d = args.d if args.d is not None else cfg.target_d
    kernel = _kernel(cfg, N, d)
    g = graphon_at(kernel, ScaleFunction(cfg.scale_exponent), N)
    s_lat, s_edge = np.random.SeedSequence([cfg.seed, N]).generate_state(2, dtype=np.uint64)
    inst = sample_graph(g, sample_latents(N, int(s_lat)), int(s_edge), _signal(cfg))
    out = _out_dir(cfg, "generate")
    dio.write_graph(os.path.join(out, "graph.txt"), inst.graph)
    dio.write_vector(os.path.join(out, "signal.txt"), inst.signal)
    dio.write_vector(os.path.join(out, "latents.txt"), inst.latents)
    print(f"N={N} m={inst.graph.m} c_d={kernel.c_d!r} mean_degree={2 * inst.graph.m / N:.4f} -> {out}")
    return EXIT_OK


def _load_instance(args, cfg, d) -> SampledInstance:
    graph = dio.read_graph(args.graph)
    signal = dio.read_vector(args.signal)
    latents = dio.read_vector(args.latents)
    kernel = _kernel(cfg, graph.n, d) if graph.n >= 2 else Kernel(cfg.kernel)
    g = Graphon(kernel, ScaleFunction(cfg.scale_exponent)(graph.n))
    return SampledInstance(graph, signal, latents, g, _signal(cfg))


def cmd_downsample(args, cfg) -> int:
    mode = args.mode or cfg.downsample_mode
    d = args.d if args.d is not None else cfg.target_d
    inst = _load_instance(args, cfg, d)
    seed = int(np.random.SeedSequence([cfg.seed, inst.n, args.n]).generate_state(1, dtype=np.uint64)[0])
    small = downsample(inst, args.n, mode, seed)
    out = _out_dir(cfg, "downsample")
    dio.write_graph(os.path.join(out, "graph.txt"), small.graph)
    dio.write_vector(os.path.join(out, "signal.txt"), small.signal)
    dio.write_vector(os.path.join(out, "latents.txt"), small.latents)
    print(f"{mode}: N={inst.n} -> n={args.n} m={small.graph.m} -> {out}")
    return EXIT_OK


def cmd_forward(args, cfg) -> int:
    graph = dio.read_graph(args.graph)
    x = dio.read_vector(args.signal)
    if args.normalize == "n":
        shift = make_shift(graph, "by_n")
        radius = 1.0
        eps = None
    else:
        eps = args.eps
        if eps is None:
            N = args.N or graph.n
            g = graphon_at(_kernel(cfg, N, cfg.target_d), ScaleFunction(cfg.scale_exponent), N)
            eps = edge_density(g, cfg.quad_points)
            radius = cfg.radius_factor * be.graphon_spectrum(g, cfg.spectrum_m, eps).radius
        else:
            radius = cfg.radius_factor
        shift = make_shift(graph, "by_eps_n", eps)
    if args.model:
        model = dio.read_model(args.model)
    else:
        model = random_init(cfg.layers, cfg.features, cfg.taps, cfg.weight_seed, radius, cfg.activation)
    y = gcn_forward(model, shift, x)
    out = _out_dir(cfg, "forward")
    dio.write_vector(os.path.join(out, "output.txt"), y)
    if args.save_model:
        dio.write_model(args.save_model, model)
    scale = "n" if eps is None else f"eps*n with eps={eps!r}"
    print(f"n={graph.n} shift=S/({scale}) ||Y||_2={l2_norm_1d(induce_signal(y)):.6g} -> {out}")
    return EXIT_OK


def cmd_bound(args, cfg) -> int:
    Ns = args.N or cfg.N_list
    ns = args.n or cfg.n_list
    ctx = prepare_context(cfg, [(N, cfg.target_d) for N in Ns])
    print(f"{'N':>6}{'n':>6}{'graph term':>15}{'signal term':>15}{'response term':>15}{'total':>15}")
    for N in Ns:
        cell = ctx.cells[(N, float(cfg.target_d))]
        for n in ns:
            if n > N:
                continue
            total, (t1, t2, t3) = cell_bound(ctx, cell, n)
            print(f"{N:>6}{n:>6}{t1:>15.6g}{t2:>15.6g}{t3:>15.6g}{total:>15.6g}")
    # Single filter h(S/n), non-amplifying on [-1, 1]; spectrum of W_N itself.
    X = ctx.signal_fn
    taps = random_init(1, 1, cfg.taps, cfg.weight_seed, 1.0).taps[0][0, 0]
    print("\nsingle-filter bound (S/n normalization)")
    print(f"{'N':>6}{'n':>6}{'bound':>15}")
    for N in Ns:
        cell = ctx.cells[(N, float(cfg.target_d))]
        spec = be.graphon_spectrum(cell.graphon, cfg.spectrum_m)
        for n in ns:
            if n > N:
                continue
            b = be.BoundInputs(N, n, cell.degree, cell.graphon.t, cell.L1, cell.L2sq,
                               cell.graphon.kernel.lipschitz_A, X.lipschitz_As,
                               be.filter_lipschitz(taps, (-1.0, 1.0)), 0.0, be.delta_h(taps, spec))
            print(f"{N:>6}{n:>6}{be.theorem2_bound(b, X.l2_norm()):>15.6g}")
    return EXIT_OK


def cmd_check_lemmas(args, cfg) -> int:
    quick = args.quick
    X = _signal(cfg)
    scale = ScaleFunction(cfg.scale_exponent)
    rows = be.check_lemma2(X, (64, 256, 1024), 30 if quick else 200, cfg.seed)

    def graphon_for(N):
        return graphon_at(_kernel(cfg, N, cfg.target_d), scale, N)

    rows += be.check_lemma3(graphon_for, (128, 256, 512), 30 if quick else 100, cfg.seed,
                            quad_points=cfg.quad_points)
    g1 = graphon_for(cfg.N_list[0])
    g2 = Graphon(g1.kernel.with_cd(2.0 * g1.kernel.c_d), g1.t)
    rows += be.check_lemma4(g1, g2, 256)
    rows += be.check_order_statistics(10_000, 30 if quick else 200, cfg.seed)
    if args.with_theorem2:
        rows += be.check_theorem2(Kernel(cfg.kernel), scale, X, 1024, (128, 256), cfg.target_d,
                                  30 if quick else 50, cfg.seed, cfg.taps, cfg.downsample_mode,
                                  cfg.spectrum_m, cfg.quad_points)
    print(be.format_report(rows))
    out = _out_dir(cfg, "check-lemmas")
    be.write_report_csv(rows, os.path.join(out, "report.csv"))
    failed = [r.check for r in rows if not r.passed]
    print(f"\n{len(rows) - len(failed)}/{len(rows)} checks passed -> {out}")
    return EXIT_VALIDATION if failed else EXIT_OK


def cmd_sweep(args, cfg) -> int:
    run = run_scale_sweep if args.kind == "scale" else run_degree_sweep
    report = run(cfg)
    print(f"{'N':>6}{'d':>6}{'n':>6}{'mean e_r':>12}{'sd':>10}{'count':>7}{'mean |Y_N-Y_n|':>17}{'bound':>12}")
    for s in report.summaries:
        print(f"{s.N:>6}{s.d_target:>6g}{s.n:>6}{s.mean_er:>12.5g}{s.sd_er:>10.3g}{s.count:>7}"
              f"{s.mean_abs_err:>17.5g}{s.bound_rhs:>12.4g}")
    for c in report.checks:
        if c.status != "pass":
            print(f"{c.status.upper()}: {c.check} {c.group} n={c.n}: {c.detail}")
    bad = sum(c.status == "fail" for c in report.checks)
    failed_trials = sum(1 for r in report.trials if r.error)
    if failed_trials:
        print(f"{failed_trials} trial results were recorded as failures (see results.csv)")
    print(f"{len(report.checks) - bad}/{len(report.checks)} checks without failure -> {report.out_path}")
    return EXIT_VALIDATION if bad else EXIT_OK


def cmd_plot(args, cfg) -> int:
    rows = [s for s in read_summary_csv(args.summary) if s.count > 0 and not math.isnan(s.mean_er)]
    path = args.output or os.path.join(os.path.dirname(os.path.abspath(args.summary)), "figure.svg")
    emit_plot(rows, path, group_by=args.group_by)
    print(f"{len(rows)} points -> {path}")
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "downsample": cmd_downsample,
    "forward": cmd_forward,
    "bound": cmd_bound,
    "check-lemmas": cmd_check_lemmas,
    "sweep": cmd_sweep,
    "plot": cmd_plot,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_VALIDATION
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_VALIDATION
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, DomainError, InfeasibleError, DegenerateOutputError, NumericalError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
