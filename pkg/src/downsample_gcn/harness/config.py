"""Flat ``key = value`` experiment configuration.

Blank lines and ``#`` comments are ignored; list values are comma separated.
Unknown keys, repeated keys and malformed values raise :class:`ConfigError`.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, fields

from ..errors import ConfigError
from ..gcn_engine import ACTIVATIONS
from ..graph_sampler import DOWNSAMPLE_MODES
from ..kernel_model import BASE_KERNELS, SIGNAL_KINDS
from ..bound_evaluator import L1L2_READINGS

__all__ = ["ExperimentConfig", "NORMALIZERS", "load_config", "parse_config", "format_config"]

# eps_N: both graphs scaled by eps(N) (the large-graph density; default).
# eps_of_n: the small graph uses the density of its own size-n model graphon.
# empirical: each graph uses its own observed edge density.
NORMALIZERS = ("eps_N", "eps_of_n", "empirical")


def _list_default(default):
    return field(default_factory=lambda: list(default))


@dataclass
class ExperimentConfig:
    kernel: str = "exp-product"
    c_d: float | None = None
    target_d: float = 40.0
    d_list: list = _list_default([40.0, 24.0, 12.0])
    scale_exponent: float = 0.5
    signal: str = "cos"
    signal_freq: float = 1.0
    signal_value: float = 1.0
    layers: int = 3
    features: int = 16
    taps: int = 4
    activation: str = "relu"
    weight_seed: int = 0
    radius_factor: float = 1.5
    normalizer: str = "eps_N"
    N_list: list = _list_default([2048, 4096, 8192])
    degree_N: int = 2048
    n_list: list = _list_default([128, 256, 512, 1024, 2048])
    downsample_mode: str = "induced"
    trials: int = 10
    seed: int = 0
    quad_points: int = 2048
    spectrum_m: int = 512
    l1l2_reading: str = "integral"
    record_wall_time: bool = False
    out_dir: str = "out"
    threads: int = 1

    def validate(self) -> "ExperimentConfig":
        choices = {
            "kernel": BASE_KERNELS,
            "signal": SIGNAL_KINDS,
            "activation": ACTIVATIONS,
            "normalizer": NORMALIZERS,
            "downsample_mode": DOWNSAMPLE_MODES,
            "l1l2_reading": L1L2_READINGS,
        }
        for key, allowed in choices.items():
            if getattr(self, key) not in allowed:
                raise ConfigError(f"{key} must be one of {allowed}, got {getattr(self, key)!r}")
        positive = ("layers", "features", "taps", "trials", "threads", "degree_N")
        for key in positive:
            if getattr(self, key) < 1:
                raise ConfigError(f"{key} must be at least 1, got {getattr(self, key)}")
        if self.quad_points < 16 or self.quad_points % 2:
            raise ConfigError("quad_points must be an even integer >= 16")
        if self.spectrum_m < 16:
            raise ConfigError("spectrum_m must be at least 16")
        if not 0 < self.scale_exponent <= 1:
            raise ConfigError("scale_exponent must lie in (0, 1]")
        if self.radius_factor < 1:
            raise ConfigError("radius_factor must be at least 1")
        if self.c_d is not None and self.c_d < 0:
            raise ConfigError("c_d must be nonnegative")
        if self.target_d <= 0 or any(d <= 0 for d in self.d_list):
            raise ConfigError("target degrees must be positive")
        if not self.N_list or not self.n_list or not self.d_list:
            raise ConfigError("N_list, n_list and d_list must be nonempty")
        if min(self.n_list) < 2:
            raise ConfigError("every n must be at least 2")
        for big in list(self.N_list) + [self.degree_N]:
            if max(self.n_list) > big:
                raise ConfigError(f"n={max(self.n_list)} exceeds paired N={big}")
        if self.seed < 0 or self.weight_seed < 0:
            raise ConfigError("seeds must be nonnegative")
        return self

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes).validate()


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parser_for(f):
    default = f.default if f.default is not dataclasses.MISSING else f.default_factory()
    if f.name in ("N_list", "n_list"):
        return lambda s: [int(v) for v in s.split(",") if v.strip()]
    if f.name == "d_list":
        return lambda s: [float(v) for v in s.split(",") if v.strip()]
    if f.name == "c_d":
        return lambda s: None if s.lower() in ("", "none", "auto") else float(s)
    if isinstance(default, bool):
        return _parse_bool
    if isinstance(default, int):
        return int
    if isinstance(default, float):
        return float
    return str


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    known = {f.name: f for f in fields(ExperimentConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value")
        key, val = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: key {key!r} given twice")
        try:
            values[key] = _parser_for(known[key])(val)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {exc}") from None
    return ExperimentConfig(**values).validate()


def load_config(path) -> ExperimentConfig:
    """Read a config file; ``OSError`` propagates for the caller to report."""
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), str(path))


def _format_value(v) -> str:
    if v is None:
        return "auto"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, list):
        return ",".join(_format_value(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def format_config(cfg: ExperimentConfig) -> str:
    """Every key with its resolved value, in a form :func:`parse_config` accepts."""
    return "".join(f"{f.name} = {_format_value(getattr(cfg, f.name))}\n" for f in fields(cfg))
