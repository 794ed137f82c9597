"""Sparse graphon random graphs, graph downsampling and GCN transferability bounds.

Modules:

* ``kernel_model``: clipped kernel, scale and signal functions, density and
  degree functionals, ``c_d`` calibration.
* ``graph_sampler``: sparse graph sampling and downsampling.
* ``gcn_engine``: polynomial graph filters and untrained GCN forward passes.
* ``continuous_forms``: induced step functions, exact L2 distances and the
  graphon neural network.
* ``bound_evaluator``: transferability bounds, graphon spectra and Monte
  Carlo checks of the sampling lemmas.
* ``harness``: experiment configuration, sweeps and figures; ``cli`` wraps it.
"""
from .errors import ConfigError, DegenerateOutputError, DomainError, InfeasibleError, NumericalError

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DegenerateOutputError",
    "DomainError",
    "InfeasibleError",
    "NumericalError",
    "__version__",
]
