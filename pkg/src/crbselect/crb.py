"""Two-target and single-target angle-estimation bounds for a weighted
linear array, plus an independent projection-matrix cross-check.

All bounds are reported as estimator variance lower bounds scaled by
sigma^2 / (2 T). Configurations that cannot resolve two targets (singular
steering Gram matrix, or vanishing residual information) yield
``math.inf`` rather than an arbitrary large number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ArrayGeometry, DeltaGrid, Selection, as_weights

# Scale-aware cutoffs for declaring a configuration unidentifiable.
SINGULAR_RTOL = 1e-12
DENOM_RTOL = 1e-12
# Allowed imaginary residue of the analytically real information scalar.
IMAG_RTOL = 1e-9


class NumericalConsistencyError(ArithmeticError):
    """An analytically real quantity came out with a non-negligible
    imaginary part; the computation cannot be trusted."""


@dataclass(frozen=True)
class CrbParams:
    """Noise/snapshot scaling sigma^2 / (2 T) applied to every bound."""

    noise_variance: float = 2.0
    snapshots: int = 1

    def __post_init__(self):
        if self.noise_variance <= 0:
            raise ValueError("noise variance must be positive")
        if self.snapshots < 1:
            raise ValueError("snapshot count must be a positive integer")

    @property
    def factor(self) -> float:
        return self.noise_variance / (2.0 * self.snapshots)

    @classmethod
    def from_factor(cls, factor: float) -> "CrbParams":
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return cls(noise_variance=2.0 * factor, snapshots=1)


def _check_imag_residue(values: np.ndarray, mask: np.ndarray) -> None:
    """The residual-information scalar is real for a Hermitian positive
    definite Gram matrix; reject the result if rounding says otherwise."""
    bad = mask & (np.abs(values.imag) > IMAG_RTOL * (1.0 + np.abs(values.real)))
    if np.any(bad):
        worst = np.abs(values.imag[bad]).max()
        raise NumericalConsistencyError(
            f"imaginary residue {worst:.3e} exceeds {IMAG_RTOL} relative"
        )


def _gram_det_pairwise(x, p, dws):
    """det of the 2x2 steering Gram matrix via the Lagrange identity,
    4 sum_{n<m} p_n p_m sin^2((x_n - x_m) dw / 2): a sum of nonnegative
    terms, unlike total^2 - |phase_sum|^2 which cancels near ambiguity."""
    live = np.flatnonzero(p > 0)
    if live.size < 2:
        return np.zeros(len(dws), dtype=np.longdouble)
    i, j = np.triu_indices(live.size, k=1)
    gaps = x[live[i]] - x[live[j]]
    pair_w = p[live[i]] * p[live[j]]
    half = np.sin(np.outer(gaps, np.asarray(dws, dtype=np.longdouble)) / 2.0)
    return 4.0 * (pair_w @ (half * half))


def _denominators(geometry: ArrayGeometry, weights, dws: np.ndarray):
    """Residual information: centered second moment minus
    cross^H gram^{-1} cross, per separation. Vectorized over ``dws``.

    Evaluated in extended precision with positions centered at their
    weighted mean (the quantity is translation invariant) and with a
    pairwise fallback for the Gram determinant: the plain expansion
    cancels up to moment2/denominator leading digits near ambiguous
    separations, and double precision alone cannot hold the 1e-8
    agreement with the projection oracle there.
    """
    p = as_weights(weights, geometry.size).astype(np.longdouble)
    total = p.sum()
    x = geometry.positions.astype(np.longdouble)
    if total > 0:
        x = x - (p @ x) / total
    angles = np.outer(x, np.asarray(dws, dtype=np.longdouble))
    phases = np.cos(angles) + 1j * np.sin(angles)
    phase_sum = p @ phases
    cross0 = p @ x  # ~0 after centering; kept for the exact quadratic form
    cross1 = (p * x) @ np.conj(phases)
    moment2 = p @ (x * x)

    det = total * total - (phase_sum * np.conj(phase_sum)).real
    shaky = det <= 1e-2 * total * total
    if np.any(shaky):
        det = np.where(shaky, _gram_det_pairwise(x, p, dws), det)
    singular = det <= SINGULAR_RTOL * total * total
    safe_det = np.where(singular, np.longdouble(1.0), det)

    # cross^H adj(gram) cross expanded for the 2x2 Hermitian gram
    mixed = cross0 * phase_sum * cross1
    quad = (total * cross0 * cross0 - mixed - np.conj(mixed)
            + total * (cross1 * np.conj(cross1))) / safe_det
    schur = moment2 - quad
    _check_imag_residue(schur.astype(complex), ~singular)

    denom = schur.real.astype(float)
    infinite = singular | (denom <= DENOM_RTOL * float(moment2))
    return denom, infinite


def two_target_crb(geometry: ArrayGeometry, weights, dw: float,
                   params: CrbParams) -> float:
    """Variance bound shared by two uncorrelated equal-power targets
    separated by ``dw``; ``math.inf`` when the pair is unidentifiable."""
    if not 0.0 < dw <= math.pi:
        raise ValueError(f"separation {dw} outside (0, pi]")
    denom, infinite = _denominators(geometry, weights, np.array([dw]))
    if infinite[0]:
        return math.inf
    return params.factor / denom[0]


def crb_over_grid(geometry: ArrayGeometry, weights, grid: DeltaGrid,
                  params: CrbParams) -> np.ndarray:
    """Two-target bound at every grid separation (``inf`` where lost)."""
    denom, infinite = _denominators(geometry, weights, grid.points)
    return np.where(infinite, np.inf, params.factor / np.where(infinite, 1.0, denom))


def worst_case_crb(geometry: ArrayGeometry, weights, grid: DeltaGrid,
                   params: CrbParams) -> tuple[float, float]:
    """Maximum of the two-target bound over the grid.

    Returns ``(value, argmax_dw)``. Ties, including multiple infinities,
    resolve to the smallest separation.
    """
    values = crb_over_grid(geometry, weights, grid, params)
    i = int(np.argmax(values))  # first occurrence wins: smallest separation
    return float(values[i]), float(grid.points[i])


def single_target_crb(geometry: ArrayGeometry, weights, params: CrbParams) -> float:
    """Variance bound for a single target, the one-source specialization.

    The denominator sum(p x^2) - (sum p x)^2 / sum(p) is the weighted
    position variance; computed in centered form, which is exact and free
    of cancellation.
    """
    p = as_weights(weights, geometry.size)
    x = geometry.positions
    total = float(p.sum())
    if total <= SINGULAR_RTOL:
        return math.inf
    centered = x - float(p @ x) / total
    denom = float(p @ (centered * centered))
    if denom <= DENOM_RTOL * float(p @ (x * x)):
        return math.inf
    return params.factor / denom


def projection_oracle_crb(geometry: ArrayGeometry, selection: Selection,
                          omega1: float, omega2: float,
                          params: CrbParams) -> float:
    """Bound for target 1 computed from first principles on the selected
    subarray: project the steering derivative onto the orthogonal
    complement of the steering span and invert the residual energy.

    Depends on the two angles only through their separation; used as an
    independent oracle for :func:`two_target_crb`.
    """
    if selection.m < 2:
        raise ValueError("projection oracle needs at least 2 selected sensors")
    if abs(math.remainder(omega2 - omega1, 2.0 * math.pi)) < 1e-12:
        raise ValueError("target angles coincide modulo 2 pi")
    xs = geometry.positions[selection.values.astype(bool)]
    steer = np.exp(1j * np.outer(xs, [omega1, omega2]))
    deriv = 1j * xs[:, None] * steer
    if np.linalg.matrix_rank(steer) < 2:
        return math.inf
    coeff, *_ = np.linalg.lstsq(steer, deriv, rcond=None)
    residual = deriv - steer @ coeff
    # diag(D^H Pperp D) as residual energies: the projected-out part is
    # orthogonal to the residual, and the squared norm avoids cancellation
    energy = float((xs * xs).sum())
    d1 = float((residual[:, 0].conj() @ residual[:, 0]).real)
    d2 = float((residual[:, 1].conj() @ residual[:, 1]).real)
    if d1 > DENOM_RTOL * energy and d2 > DENOM_RTOL * energy:
        if abs(d1 - d2) > 1e-9 * max(abs(d1), abs(d2)):
            raise NumericalConsistencyError(
                f"per-target information differs: {d1} vs {d2}"
            )
    if d1 <= DENOM_RTOL * energy:
        return math.inf
    return params.factor / d1
