"""Report figures written next to the CSV output.

Figures are built on ``matplotlib.figure.Figure`` with the Agg canvas, so
nothing touches pyplot's global state or needs a display.
"""

from __future__ import annotations

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

STYLE = {
    "font.size": 9,
    "axes.linewidth": 0.8,
    "lines.linewidth": 1.2,
}


def _figure(rows, cols, width=7.0, height=None):
    height = height or 2.4 * rows
    fig = Figure(figsize=(width, height), tight_layout=True)
    FigureCanvasAgg(fig)
    axes = fig.subplots(rows, cols, squeeze=False)
    for ax in axes.flat:
        ax.tick_params(labelsize=STYLE["font.size"] - 1, width=STYLE["axes.linewidth"])
        for spine in ("top", "right"):
            ax.spines[spine].set_visible(False)
    return fig, axes


def _save(fig, path):
    fig.savefig(path, dpi=120)
    return path


def plot_fields(traj, path):
    """rho, u, P and f3 at the first and last recorded times."""
    fig, axes = _figure(2, 2)
    names = ["rho", "u", "P", "f3"]
    for ax, name, col in zip(axes.flat, names, (0, 1, 2, 3)):
        for k, style in ((0, "--"), (len(traj.times) - 1, "-")):
            values = traj.fields[k][:, col] * (2.0 if col == 2 else 1.0)
            ax.plot(traj.x, values, style, lw=STYLE["lines.linewidth"], label=f"t={traj.times[k]:.4g}")
        ax.set_xlabel("x", fontsize=STYLE["font.size"])
        ax.set_ylabel(name, fontsize=STYLE["font.size"])
    axes[0, 0].legend(fontsize=STYLE["font.size"] - 1, frameon=False)
    return _save(fig, path)


def plot_diagnostics(traj, path):
    fig, axes = _figure(1, 2, height=2.6)
    t = np.asarray(traj.times)
    d = traj.diagnostics
    for name in ("mass", "momentum", "energy"):
        values = np.asarray(d[name])
        axes[0, 0].plot(t, values - values[0], label=name)
    axes[0, 0].set_title("change of totals", fontsize=STYLE["font.size"])
    axes[0, 0].legend(fontsize=STYLE["font.size"] - 1, frameon=False)
    for name in ("momentum", "energy"):
        res = np.asarray(d[f"{name}_residual"])
        mag = np.asarray(d[f"{name}_forcing"])
        rel = np.divide(res, mag, out=np.zeros_like(res), where=mag > 0)
        axes[0, 1].plot(t, rel, label=name)
    axes[0, 1].set_title("balance residual / source magnitude", fontsize=STYLE["font.size"])
    axes[0, 1].legend(fontsize=STYLE["font.size"] - 1, frameon=False)
    for ax in axes.flat:
        ax.set_xlabel("t", fontsize=STYLE["font.size"])
    return _save(fig, path)


def plot_asymptotics(x, g, predictions, path):
    """``predictions`` maps t to an AsymptoticPrediction."""
    fig, axes = _figure(1, 2, height=2.6)
    axes[0, 0].plot(x, g, color="k")
    axes[0, 0].axhline(0.0, color="0.6", lw=0.6)
    axes[0, 0].set_ylabel("g(x)", fontsize=STYLE["font.size"])
    for t, pred in predictions.items():
        axes[0, 1].plot(x, pred.f3, label=f"t={t:g}")
    axes[0, 1].set_ylabel("f3 (leading order)", fontsize=STYLE["font.size"])
    axes[0, 1].legend(fontsize=STYLE["font.size"] - 1, frameon=False)
    for ax in axes.flat:
        ax.set_xlabel("x", fontsize=STYLE["font.size"])
    return _save(fig, path)


def plot_spectra(records, path):
    """Computed against predicted eigenvalues for eigen-report records."""
    fig, axes = _figure(1, 1, width=4.0, height=3.6)
    ax = axes[0, 0]
    for rec in records:
        ax.plot(rec["predicted"], rec["eigenvalues"], ".", ms=3)
    lo = min(min(r["predicted"]) for r in records)
    hi = max(max(r["predicted"]) for r in records)
    ax.plot([lo, hi], [lo, hi], color="0.6", lw=0.6)
    ax.set_xlabel("predicted", fontsize=STYLE["font.size"])
    ax.set_ylabel("computed", fontsize=STYLE["font.size"])
    return _save(fig, path)
