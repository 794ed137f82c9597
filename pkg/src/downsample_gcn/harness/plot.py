"""SVG figure of mean relative error against sample size, one curve per group."""
from __future__ import annotations

import matplotlib
from matplotlib.figure import Figure

from ..errors import DomainError

__all__ = ["emit_plot"]

_LABELS = {"N": "N = {:g}", "d_target": "d = {:g}"}


def emit_plot(summaries, path, group_by: str = "N", title: str | None = None) -> None:
    """Write ``mean_er`` vs ``n`` (log2 axis) with +-1 sd error bars to ``path``.

    Output is byte-stable for equal inputs: the SVG carries no date and its
    element ids come from a fixed hash salt.
    """
    summaries = list(summaries)
    if not summaries:
        raise DomainError("emit_plot needs at least one summary row")
    if group_by not in _LABELS:
        raise DomainError(f"group_by must be one of {tuple(_LABELS)}")
    curves: dict = {}
    for s in summaries:
        curves.setdefault(getattr(s, group_by), []).append(s)

    fig = Figure(figsize=(6.0, 4.0))
    ax = fig.add_subplot()
    for g in sorted(curves):
        pts = sorted(curves[g], key=lambda s: s.n)
        ax.errorbar([s.n for s in pts], [s.mean_er for s in pts], yerr=[s.sd_er for s in pts],
                    marker="o", capsize=3, label=_LABELS[group_by].format(g))
    ax.set_xscale("log", base=2)
    ax.set_xlabel("sampled graph size n")
    ax.set_ylabel("mean relative error")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    with matplotlib.rc_context({"svg.hashsalt": "downsample-gcn", "svg.fonttype": "path"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
