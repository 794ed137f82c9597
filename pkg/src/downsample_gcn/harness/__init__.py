"""Experiment configuration, transferability sweeps and figures."""
from .config import ExperimentConfig, format_config, load_config, parse_config
from .experiment import (
    SweepReport,
    SweepSummary,
    TrialResult,
    evaluate_trends,
    prepare_context,
    run_degree_sweep,
    run_scale_sweep,
    run_trial,
)
from .plot import emit_plot

__all__ = [
    "ExperimentConfig",
    "format_config",
    "load_config",
    "parse_config",
    "SweepReport",
    "SweepSummary",
    "TrialResult",
    "evaluate_trends",
    "prepare_context",
    "run_degree_sweep",
    "run_scale_sweep",
    "run_trial",
    "emit_plot",
]
