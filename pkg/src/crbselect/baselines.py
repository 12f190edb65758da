"""Reference selections to compare the optimized designs against."""

from __future__ import annotations

import itertools
import math

import numpy as np

from .crb import CrbParams, worst_case_crb
from .model import ArrayGeometry, DeltaGrid, Selection

SUBSET_CAP = 200_000


def edge_selection(n: int, m: int) -> Selection:
    """The m sensors closest to the array ends: ceil(m/2) leftmost plus
    floor(m/2) rightmost (odd counts favor the left end). This is what a
    single-target aperture criterion picks on a ULA."""
    if not 1 <= m <= n:
        raise ValueError(f"selection size {m} outside [1, {n}]")
    left = (m + 1) // 2
    right = m - left
    indices = np.r_[np.arange(left), np.arange(n - right, n)]
    return Selection.from_indices(n, indices)


def random_selection(n: int, m: int, seed: int) -> Selection:
    """Uniformly random size-m subset, deterministic for a given seed."""
    if not 1 <= m <= n:
        raise ValueError(f"selection size {m} outside [1, {n}]")
    rng = np.random.default_rng(seed)
    return Selection.from_indices(n, rng.choice(n, size=m, replace=False))


def exhaustive_best(geometry: ArrayGeometry, m: int, grid: DeltaGrid,
                    params: CrbParams, cap: int = SUBSET_CAP) -> tuple[Selection, float]:
    """Brute-force optimum over all size-m subsets, for validating the
    relaxation pipeline on small instances.

    Ties go to the lexicographically smallest index set. Refuses when the
    subset count exceeds ``cap``.
    """
    n = geometry.size
    if not 1 <= m <= n:
        raise ValueError(f"selection size {m} outside [1, {n}]")
    count = math.comb(n, m)
    if count > cap:
        raise ValueError(f"{count} subsets exceed the cap of {cap}")
    best_value = math.inf
    best_selection = None
    for combo in itertools.combinations(range(n), m):
        selection = Selection.from_indices(n, combo)
        value, _ = worst_case_crb(geometry, selection, grid, params)
        if best_selection is None or value < best_value:
            best_value = value
            best_selection = selection
    return best_selection, best_value
