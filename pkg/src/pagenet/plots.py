"""Figures for the report stage. Every function writes one PNG."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .stats import EmpiricalDistribution  # noqa: E402

COLORS = {
    "users": "#7b3294",
    "posts": "#67a9cf",
    "likes": "#d7191c",
    "comments": "#2b83ba",
    "shares": "#f1a1c8",
    "polarized": "#1a1aa6",
}


def plot_settings(fontsize=9):
    plt.rc("font", family="sans-serif", size=fontsize)
    plt.rc("axes", labelsize=fontsize, titlesize=fontsize)
    plt.rc("legend", fontsize=fontsize - 1, frameon=False)
    plt.rc("lines", linewidth=1.2, markersize=3)


def save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    # no Software tag: keeps the bytes independent of the matplotlib build
    fig.savefig(path, dpi=110, metadata={"Software": None})
    plt.close(fig)
    return path


def ccdf_axes(ax, series: Mapping[str, Sequence[float]], colors: Mapping[str, str] | None = None, xlabel=""):
    """Log-log CCDF curves; non-positive values cannot sit on a log axis and are skipped."""
    colors = colors or {}
    for label, samples in series.items():
        data = np.asarray(samples, dtype=float)
        data = data[data > 0]
        if data.size == 0:
            continue
        x, c = EmpiricalDistribution(data).ccdf_points()
        keep = c > 0
        ax.loglog(x[keep], c[keep], marker="o", label=label, color=colors.get(label))
    ax.set_xlabel(xlabel)
    ax.set_ylabel("CCDF")
    if ax.get_legend_handles_labels()[0]:
        ax.legend()


def ccdf_figure(series: Mapping[str, Sequence[float]], path: Path, title="", xlabel="", colors=None) -> Path:
    plot_settings()
    fig, ax = plt.subplots(figsize=(4.2, 3.2), layout="constrained")
    ccdf_axes(ax, series, colors or COLORS, xlabel)
    ax.set_title(title)
    return save(fig, path)


def post_type_figure(fractions: Mapping[str, Mapping[str, float | None]], path: Path) -> Path:
    """Grouped bars: for each measure, the fraction falling on each post type."""
    plot_settings()
    measures = list(fractions)
    types = list(next(iter(fractions.values()))) if fractions else []
    fig, ax = plt.subplots(figsize=(4.6, 3.2), layout="constrained")
    width = 0.8 / max(len(measures), 1)
    x = np.arange(len(types))
    for i, m in enumerate(measures):
        vals = [fractions[m][t] or 0.0 for t in types]
        ax.bar(x + i * width, vals, width, label=m, color=COLORS.get(m))
    ax.set_xticks(x + width * (len(measures) - 1) / 2, types)
    ax.set_ylabel("fraction")
    ax.set_ylim(0, 1)
    ax.legend()
    return save(fig, path)


def admin_posts_figure(per_page: Mapping[str, tuple[int, int]], path: Path) -> Path:
    plot_settings()
    pages = list(per_page)
    admin = [per_page[p][0] for p in pages]
    other = [per_page[p][1] for p in pages]
    fig, ax = plt.subplots(figsize=(6.0, 3.0), layout="constrained")
    x = np.arange(len(pages))
    ax.bar(x - 0.2, admin, 0.4, label="admin", color="#2c7bb6")
    ax.bar(x + 0.2, other, 0.4, label="not admin", color="#1a9641")
    ax.set_xticks(x, pages, rotation=90, fontsize=5)
    ax.set_ylabel("posts")
    ax.legend()
    return save(fig, path)


def weight_fraction_figure(curves: Mapping[str, Mapping[float, float]], path: Path) -> Path:
    """Preserved weight fraction against alpha, one curve per network."""
    plot_settings()
    fig, ax = plt.subplots(figsize=(4.2, 3.2), layout="constrained")
    for name, curve in curves.items():
        alphas = sorted(curve)
        ax.plot(alphas, [curve[a] for a in alphas], marker="o", label=name)
    ax.set_xscale("log")
    ax.set_xlabel("alpha")
    ax.set_ylabel("weight fraction preserved")
    ax.set_ylim(0, 1)
    ax.legend()
    return save(fig, path)
