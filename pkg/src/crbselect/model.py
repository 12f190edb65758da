"""Array geometries, selection vectors, separation grids, and the bound's
building blocks.

Positions are dimensionless phase positions: a standard uniform linear
array occupies the integers 0..N-1, and a non-uniform array is any
strictly increasing set of reals. The angular variable of interest is the
electrical phase separation between the two targets, always in (0, pi].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Needs to be > 0 and at most pi; the upper endpoint is included.
SEPARATION_MAX = math.pi

# Half-power beamwidth at broadside of a half-wavelength-spaced N-element
# ULA, used as the default smallest separation worth designing for.
BEAMWIDTH_COEF = 1.772


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.asarray(values, dtype=dtype).copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ArrayGeometry:
    """Candidate sensor positions, strictly increasing real phase positions."""

    positions: np.ndarray

    def __post_init__(self):
        pos = _frozen_array(self.positions)
        if pos.ndim != 1 or pos.size < 2:
            raise ValueError(f"geometry needs at least 2 positions, got shape {pos.shape}")
        if not np.all(np.isfinite(pos)):
            raise ValueError("geometry positions must be finite")
        if not np.all(np.diff(pos) > 0):
            raise ValueError("geometry positions must be strictly increasing")
        object.__setattr__(self, "positions", pos)

    @property
    def size(self) -> int:
        return int(self.positions.size)


def make_ula(n: int) -> ArrayGeometry:
    """Uniform linear array with integer positions 0..n-1."""
    if n < 2:
        raise ValueError(f"a candidate array needs n >= 2 sensors, got {n}")
    return ArrayGeometry(np.arange(n, dtype=float))


@dataclass(frozen=True)
class Selection:
    """Binary per-sensor selection flags."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.ndim != 1:
            raise ValueError("selection must be a flat vector")
        if not np.all((vals == 0) | (vals == 1)):
            raise ValueError("selection entries must be 0 or 1")
        object.__setattr__(self, "values", _frozen_array(vals, dtype=int))

    @classmethod
    def from_indices(cls, n: int, indices) -> "Selection":
        idx = np.asarray(indices, dtype=int)
        if idx.size != np.unique(idx).size:
            raise ValueError("selected indices must be unique")
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise ValueError(f"selected indices out of range for n={n}")
        vals = np.zeros(n, dtype=int)
        vals[idx] = 1
        return cls(vals)

    @property
    def m(self) -> int:
        return int(self.values.sum())

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.values)

    def pattern(self, selected: str = "#", unselected: str = ".") -> str:
        return "".join(selected if v else unselected for v in self.values)


@dataclass(frozen=True)
class RelaxedSelection:
    """Fractional selection weights in [0, 1] summing to the target size.

    Entries are validated to the box within 1e-8 and then clipped exactly
    into [0, 1] so they can be used directly as inclusion probabilities.
    """

    values: np.ndarray
    target_m: int

    BOX_TOL = 1e-8
    SUM_TOL = 1e-6

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1:
            raise ValueError("relaxed selection must be a flat vector")
        if np.any(vals < -self.BOX_TOL) or np.any(vals > 1.0 + self.BOX_TOL):
            raise ValueError("relaxed weights fall outside [0, 1] beyond tolerance")
        total = vals.sum()
        if abs(total - self.target_m) > self.SUM_TOL:
            raise ValueError(
                f"relaxed weights sum to {total}, expected {self.target_m} +/- {self.SUM_TOL}"
            )
        object.__setattr__(self, "values", _frozen_array(np.clip(vals, 0.0, 1.0)))
        object.__setattr__(self, "target_m", int(self.target_m))


@dataclass(frozen=True)
class DeltaGrid:
    """Finite set of positive phase separations, sorted ascending, in (0, pi]."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise ValueError("separation grid must be non-empty")
        if not np.all(np.diff(pts) > 0):
            raise ValueError("separation grid must be strictly increasing")
        if pts[0] <= 0 or pts[-1] > SEPARATION_MAX:
            raise ValueError("separation grid points must lie in (0, pi]")
        object.__setattr__(self, "points", _frozen_array(pts))

    @property
    def size(self) -> int:
        return int(self.points.size)


def make_default_grid(geometry: ArrayGeometry, points: int,
                      min_dw: float | None = None,
                      max_dw: float = SEPARATION_MAX) -> DeltaGrid:
    """Evenly spaced separation grid, both endpoints included.

    The lower endpoint defaults to 1.772/N radians for an N-sensor
    candidate array (roughly the broadside half-power beamwidth of the
    half-wavelength ULA); pass ``min_dw`` to override it.
    """
    if points < 2:
        raise ValueError(f"grid needs at least 2 points, got {points}")
    lo = BEAMWIDTH_COEF / geometry.size if min_dw is None else float(min_dw)
    return DeltaGrid(np.linspace(lo, float(max_dw), points))


@dataclass(frozen=True)
class CrbComponents:
    """Weighted sums entering the two-target bound at one separation.

    For weights p over positions x and separation dw:

    - ``phase_sum``: sum of p_n e^{j x_n dw}, the inner product between the
      two selected steering vectors.
    - ``cross``: the pair (sum p_n x_n, sum p_n x_n e^{-j x_n dw}) coupling
      the steering derivative to the two steering vectors.
    - ``moment2``: sum of p_n x_n^2, the selected second position moment.
    - ``gram``: the 2x2 Hermitian Gram matrix of the selected steering
      vectors, with the total weight on the diagonal.

    Every field is linear in the weights.
    """

    phase_sum: complex
    cross: np.ndarray
    moment2: float
    gram: np.ndarray = field(repr=False)

    @property
    def weight_total(self) -> float:
        return float(self.gram[0, 0].real)


def as_weights(weights, n: int) -> np.ndarray:
    """Coerce a Selection, RelaxedSelection, or vector to weights in [0,1]^n."""
    if isinstance(weights, (Selection, RelaxedSelection)):
        vals = np.asarray(weights.values, dtype=float)
    else:
        vals = np.asarray(weights, dtype=float)
    if vals.shape != (n,):
        raise ValueError(f"weights have shape {vals.shape}, expected ({n},)")
    if np.any(vals < -RelaxedSelection.BOX_TOL) or np.any(vals > 1.0 + RelaxedSelection.BOX_TOL):
        raise ValueError("weights must lie in [0, 1]")
    return np.clip(vals, 0.0, 1.0)


def crb_components(geometry: ArrayGeometry, weights, dw: float) -> CrbComponents:
    """Evaluate the bound's building blocks at one separation.

    ``dw`` must lie in (0, pi]. Accepts binary or fractional weights; all
    outputs are linear in them.
    """
    if not 0.0 < dw <= SEPARATION_MAX:
        raise ValueError(f"separation {dw} outside (0, pi]")
    p = as_weights(weights, geometry.size)
    x = geometry.positions
    phases = np.exp(1j * x * dw)
    phase_sum = complex(p @ phases)
    cross = np.array([complex(p @ x), complex((p * x) @ np.conj(phases))])
    moment2 = float(p @ (x * x))
    total = float(p.sum())
    gram = np.array([[total, phase_sum], [np.conj(phase_sum), total]])
    return CrbComponents(phase_sum=phase_sum, cross=cross, moment2=moment2, gram=gram)
