"""Report writers: trace CSV, key-value summaries, plot data, figures.

All delimited output is byte-deterministic for a fixed trace: floats are
written with Python's shortest round-trip repr and rows in a fixed order.
Figures are rendered with the non-interactive matplotlib backend next to
the delimited files.
"""

from __future__ import annotations

import os
import threading

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

# pyplot is not thread-safe; concurrent experiment runs serialize here
_PLOT_LOCK = threading.Lock()

from .errors import MissingSeries
from .iterate import IterationTrace

PLOT_KINDS = ("residual", "dist_to_p", "center_agreement")


def _fmt(v: float) -> str:
    return repr(float(v))


def trace_series(trace: IterationTrace, kind: str):
    if kind == "residual":
        return list(trace.residuals)
    if kind in trace.extra_series:
        return list(trace.extra_series[kind])
    raise MissingSeries(f"trace has no series {kind!r}")


def write_trace_csv(trace: IterationTrace, path: str) -> None:
    """CSV with columns n, flattened coordinates, residual, d_to_p.

    The d_to_p column is empty unless the trace carries a dist_to_p
    series (a reference fixed point was supplied).
    """
    dims = len(trace.iterates[0].coords)
    d_to_p = trace.extra_series.get("dist_to_p")
    header = ["n"] + [f"x{i}" for i in range(dims)] + ["residual", "d_to_p"]
    lines = [",".join(header)]
    for n, pt in enumerate(trace.iterates):
        row = [str(n)]
        row.extend(_fmt(c) for c in pt.coords)
        row.append(_fmt(trace.residuals[n]) if n < len(trace.residuals) else "")
        row.append(_fmt(d_to_p[n]) if d_to_p is not None else "")
        lines.append(",".join(row))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_summary(path: str, entries: dict) -> None:
    """Flat key = value text summary; nested dicts use dotted keys."""

    def flatten(prefix, obj, out):
        for k, v in obj.items():
            key = f"{prefix}{k}"
            if isinstance(v, dict):
                flatten(key + ".", v, out)
            else:
                out.append((key, v))
        return out

    flat = flatten("", entries, [])
    with open(path, "w", newline="\n") as fh:
        for k, v in flat:
            if isinstance(v, float):
                v = _fmt(v)
            fh.write(f"{k} = {v}\n")


def emit_plot_data(trace: IterationTrace, kind: str, path: str) -> None:
    """Two-column CSV ``n,value`` for the requested series."""
    if kind not in PLOT_KINDS:
        raise MissingSeries(f"unknown plot kind {kind!r}")
    series = trace_series(trace, kind)
    with open(path, "w", newline="\n") as fh:
        fh.write("n,value\n")
        for n, v in enumerate(series):
            fh.write(f"{n},{_fmt(v)}\n")


def render_figure(trace: IterationTrace, kind: str, path: str) -> None:
    """Render one series as a PNG next to its CSV."""
    series = trace_series(trace, kind)
    with _PLOT_LOCK:
        fig, ax = plt.subplots(figsize=(6, 4))
        positive = all(v > 0 for v in series)
        plot = ax.semilogy if positive else ax.plot
        plot(range(len(series)), series, lw=1.2)
        ax.set_xlabel("iteration")
        ax.set_ylabel(kind.replace("_", " "))
        ax.set_title(f"{trace.scheme_id}: {kind.replace('_', ' ')}")
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)


def render_figures(trace: IterationTrace, out_dir: str, kinds) -> list:
    paths = []
    for kind in kinds:
        try:
            trace_series(trace, kind)
        except MissingSeries:
            continue
        path = os.path.join(out_dir, f"{kind}.png")
        render_figure(trace, kind, path)
        paths.append(path)
    return paths
