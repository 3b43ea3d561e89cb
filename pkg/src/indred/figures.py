"""PNG renderings of CLI reports.

Imported lazily (only when --plot is given) and pinned to the Agg
backend so rendering works headless. Each function writes one file and
returns its path.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

__all__ = [
    "plot_sim_report",
    "plot_intro_summary",
    "plot_km",
    "plot_spectrum",
]


def plot_sim_report(report, path: str) -> str:
    """Per-cell mean span distances with standard-error bars."""
    cells = report.cells
    idx = np.arange(len(cells))
    width = max(6.0, 0.7 * len(cells) + 2.0)
    fig, ax = plt.subplots(figsize=(width, 4.5))
    ax.errorbar(
        idx - 0.08,
        [c.mean_two_stage for c in cells],
        yerr=[c.se_two_stage for c in cells],
        fmt="o",
        capsize=3,
        label="two-stage",
    )
    ax.errorbar(
        idx + 0.08,
        [c.mean_direct for c in cells],
        yerr=[c.se_direct for c in cells],
        fmt="s",
        capsize=3,
        label="direct",
    )
    ax.set_xticks(idx)
    ax.set_xticklabels([c.label for c in cells], rotation=45, ha="right", fontsize=7)
    ax.set_ylabel("mean span distance")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_intro_summary(summary, path: str) -> str:
    """Coordinate-wise direction estimates, full vs thresholded response."""
    p = summary.means_full.shape[0]
    idx = np.arange(p)
    fig, ax = plt.subplots(figsize=(max(5.0, 0.9 * p + 2.0), 4.0))
    ax.errorbar(
        idx - 0.06,
        summary.means_full,
        yerr=summary.sds_full,
        fmt="o",
        capsize=3,
        label="full response",
    )
    ax.errorbar(
        idx + 0.06,
        summary.means_induced,
        yerr=summary.sds_induced,
        fmt="s",
        capsize=3,
        label="thresholded response",
    )
    ax.set_xticks(idx)
    ax.set_xticklabels([f"x{i + 1}" for i in range(p)])
    ax.set_ylabel("direction coordinate (first scaled to 1)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_km(curve, path: str) -> str:
    """Right-continuous survival step function."""
    t = np.concatenate([[0.0], curve.jump_times])
    s = np.concatenate([[1.0], curve.values])
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.step(t, s, where="post")
    ax.set_xlabel("time")
    ax.set_ylabel("survival")
    ax.set_ylim(-0.02, 1.02)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_spectrum(eigenvalues, path: str) -> str:
    """Descending kernel spectrum; the gap locates the dimension."""
    values = np.asarray(eigenvalues, dtype=float).ravel()
    idx = np.arange(1, values.size + 1)
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.plot(idx, values, "o-")
    ax.set_xticks(idx)
    ax.set_xlabel("component")
    ax.set_ylabel("eigenvalue")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
