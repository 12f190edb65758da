"""Seeded randomized rounding of a fractional selection to exactly m
sensors, keeping the trial with the smallest worst-case bound.

Each trial draws sensors independently with their relaxed weights as
inclusion probabilities, then repairs the count: excess sensors are
dropped lowest-weight-first, missing ones added highest-weight-first
(ties to the lower index). Trials use independent substreams derived
from (seed, trial), so results do not depend on execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .crb import CrbParams, worst_case_crb
from .model import ArrayGeometry, DeltaGrid, RelaxedSelection, Selection


@dataclass(frozen=True)
class RoundingConfig:
    trials: int = 100
    seed: int = 0
    keep_trial_values: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("rounding needs at least one trial")


@dataclass(frozen=True)
class RoundedResult:
    selection: Selection
    worst_case: float
    argmax_dw: float
    winning_trial: int  # -1 when the deterministic top-m fallback won
    per_trial_values: np.ndarray | None = None


def _repair(chosen: np.ndarray, probs: np.ndarray, m: int) -> np.ndarray:
    count = int(chosen.sum())
    if count > m:
        inside = np.flatnonzero(chosen)
        order = np.argsort(probs[inside], kind="stable")  # ascending, ties low index
        chosen[inside[order[: count - m]]] = False
    elif count < m:
        outside = np.flatnonzero(~chosen)
        order = np.argsort(-probs[outside], kind="stable")  # descending, ties low index
        chosen[outside[order[: m - count]]] = True
    return chosen


def trial_selection(relaxed: RelaxedSelection, seed: int, trial: int) -> Selection:
    """The binary selection produced by one rounding trial; a pure
    function of (relaxed weights, seed, trial index)."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(trial,)))
    probs = relaxed.values
    chosen = rng.random(probs.size) < probs
    return Selection(_repair(chosen, probs, relaxed.target_m).astype(int))


def randomized_round(relaxed: RelaxedSelection, geometry: ArrayGeometry,
                     grid: DeltaGrid, params: CrbParams,
                     config: RoundingConfig = RoundingConfig()) -> RoundedResult:
    """Best-of-trials randomized rounding.

    The winner minimizes (worst-case bound, trial index) lexicographically,
    so any evaluation order, serial or parallel, returns the same result.
    """
    if geometry.size != relaxed.values.size:
        raise ValueError("relaxed selection does not match geometry size")
    best = (math.inf, config.trials)
    best_selection = None
    best_dw = float(grid.points[0])
    values = np.empty(config.trials) if config.keep_trial_values else None
    for t in range(config.trials):
        selection = trial_selection(relaxed, config.seed, t)
        wc, dw = worst_case_crb(geometry, selection, grid, params)
        if values is not None:
            values[t] = wc
        if (wc, t) < best:
            best = (wc, t)
            best_selection = selection
            best_dw = dw
    return RoundedResult(
        selection=best_selection,
        worst_case=best[0],
        argmax_dw=best_dw,
        winning_trial=best[1],
        per_trial_values=values,
    )


def round_by_top_m(relaxed: RelaxedSelection) -> Selection:
    """Deterministic fallback: keep the m largest weights, ties to the
    lower index."""
    order = np.argsort(-relaxed.values, kind="stable")
    return Selection.from_indices(relaxed.values.size, order[: relaxed.target_m])


def round_selection(relaxed: RelaxedSelection, geometry: ArrayGeometry,
                    grid: DeltaGrid, params: CrbParams,
                    config: RoundingConfig = RoundingConfig()) -> RoundedResult:
    """Randomized rounding hedged with the top-m fallback: evaluates both
    and keeps the better, so the output is never worse than either."""
    result = randomized_round(relaxed, geometry, grid, params, config)
    fallback = round_by_top_m(relaxed)
    wc, dw = worst_case_crb(geometry, fallback, grid, params)
    if wc < result.worst_case:
        return RoundedResult(
            selection=fallback,
            worst_case=wc,
            argmax_dw=dw,
            winning_trial=-1,
            per_trial_values=result.per_trial_values,
        )
    return result
