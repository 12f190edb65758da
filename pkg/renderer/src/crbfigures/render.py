"""Matplotlib rendering of figure bundles.

Deterministic by construction: a fixed style, the Agg backend, and no
timestamps, so rendering the same bundle twice gives identical bytes.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .bundle import BundleError, FigureBundle

DPI = 150

METHOD_LABELS = {
    "edge": "single-target",
    "proposed": "proposed",
    "random": "random",
    "exhaustive": "exhaustive",
}

METHOD_COLORS = {
    "proposed": "tab:blue",
    "edge": "tab:orange",
    "random": "tab:green",
    "exhaustive": "tab:red",
}


def render_patterns(bundle: FigureBundle):
    """One grid per pattern table, one row per method, selected cells
    filled. Returns the matplotlib figure."""
    if bundle.kind != "patterns" or not bundle.patterns:
        raise BundleError("bundle holds no pattern tables")
    count = len(bundle.patterns)
    width = max(table.n for table in bundle.patterns)
    fig, axes = plt.subplots(
        count, 1, figsize=(max(6.0, width / 14.0), 1.1 * count), squeeze=False)
    for ax, table in zip(axes[:, 0], bundle.patterns):
        cells = np.array([[1 - int(ch) for ch in pattern]
                          for _, pattern in table.rows], dtype=float)
        ax.imshow(cells, cmap="gray", vmin=0.0, vmax=1.0, aspect="auto",
                  interpolation="none")
        ax.set_yticks(range(len(table.rows)))
        ax.set_yticklabels([METHOD_LABELS.get(m, m) for m, _ in table.rows],
                           fontsize=7)
        ax.set_xticks([])
        ax.set_title(f"(N, M) = ({table.n}, {table.m})", fontsize=8)
        for spine in ax.spines.values():
            spine.set_visible(True)
    fig.tight_layout()
    return fig


def render_curves(bundle: FigureBundle, log_scale: bool = True):
    """Mean line per method with a min/max band where the trials spread.
    Returns the matplotlib figure."""
    if bundle.kind != "curves" or not bundle.curves:
        raise BundleError("bundle holds no curve tables")
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    for method in bundle.methods:
        points = sorted((c for c in bundle.curves if c.method == method),
                        key=lambda c: c.x)
        xs = np.array([c.x for c in points])
        means = np.array([c.mean for c in points])
        lows = np.array([c.low for c in points])
        highs = np.array([c.high for c in points])
        color = METHOD_COLORS.get(method)
        ax.plot(xs, means, marker="o", markersize=3, color=color,
                label=METHOD_LABELS.get(method, method))
        if np.any(highs > lows):
            band = np.isfinite(lows) & np.isfinite(highs)
            ax.fill_between(xs[band], lows[band], highs[band],
                            color=color, alpha=0.25, linewidth=0)
    if log_scale:
        ax.set_yscale("log")
    ax.set_xlabel(bundle.x_label or "size")
    ax.set_ylabel("worst-case CRB")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    return fig


def render_bundle(bundle: FigureBundle, out_path, log_scale: bool = True) -> None:
    if bundle.kind == "patterns":
        fig = render_patterns(bundle)
    else:
        fig = render_curves(bundle, log_scale=log_scale)
    try:
        fig.savefig(out_path, dpi=DPI, metadata={"Software": "crbfigures"})
    finally:
        plt.close(fig)
