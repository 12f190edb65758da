"""Renders crbselect data bundles into publication-style figures."""

__version__ = "0.1.0"

from .bundle import BundleError, FigureBundle, load_bundle
from .render import render_bundle, render_curves, render_patterns

__all__ = [
    "BundleError",
    "FigureBundle",
    "load_bundle",
    "render_bundle",
    "render_curves",
    "render_patterns",
]
