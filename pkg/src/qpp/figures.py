"""Matplotlib rendering for the CLI report paths.

Figures are written to files next to the delimited output; nothing here is
interactive.  The Agg backend is forced so rendering works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

DPI = 150


def render_density_figure(ts, fs, atoms, model_id: str, path: str) -> str:
    """Plot a density curve with atom stems and save to `path`."""
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ax.plot(ts, fs, lw=1.2, color="#1f4e79", label=model_id)
    if atoms:
        positions = [p for p, _ in atoms]
        weights = [w for _, w in atoms]
        ax.stem(positions, weights, linefmt="#a33", markerfmt="o", basefmt=" ")
    ax.axhline(0.0, color="0.6", lw=0.6)
    ax.set_xlabel("t")
    ax.set_ylabel("density")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path


def render_convergence_figure(rows, path: str) -> str:
    """Log-log decay of |moment - limit| against N, one line per k.

    `rows` are dicts with keys N, k, abs_gap (floats).
    """
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ks = sorted({r["k"] for r in rows})
    for k in ks:
        pts = sorted((r["N"], r["abs_gap"]) for r in rows if r["k"] == k)
        ns = [p[0] for p in pts]
        gaps = [max(p[1], 1e-300) for p in pts]
        ax.plot(ns, gaps, marker="o", ms=3, lw=1.0, label=f"k={k}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("N")
    ax.set_ylabel("|moment - limit|")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return path
