"""Continuous conic relaxation of the minimax selection program.

The binary program minimizes an epigraph variable c subject to a
cardinality constraint and, per grid separation, a linear matrix
inequality pair obtained from the Schur complement of the bound's
denominator: a 2x2 real block tying c to the residual information, and a
3x3 complex Hermitian block forcing the shared variable g to dominate the
separation-dependent quadratic term. Relaxing the binary weights to the
unit box yields a semidefinite program in canonical conic form.

Positions are normalized to [-1, 1] while building the problem (an exact
diagonal congruence of every block; recorded per-variable factors map
solutions back). Without this, interior-point solvers can terminate with
certified-looking but wrong optima once position magnitudes reach ~1e2.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

import clarabel

from .model import ArrayGeometry, DeltaGrid, RelaxedSelection, crb_components

log = logging.getLogger(__name__)

# |c*| or |g*| beyond this would have hit the bounds of a box-constrained
# solver; flagged after the fact instead of constraining.
SOFT_BOUND = 1e9


def hermitian_to_real_embedding(h: np.ndarray) -> np.ndarray:
    """Embed a complex Hermitian m x m matrix as a real symmetric 2m x 2m
    one with the same definiteness (each eigenvalue doubled)."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("embedding needs a square matrix")
    scale = max(1.0, np.abs(h).max())
    if np.abs(h - h.conj().T).max() > 1e-12 * scale:
        raise ValueError("matrix is not Hermitian within 1e-12")
    return np.block([[h.real, -h.imag], [h.imag, h.real]])


@dataclass(frozen=True)
class PsdBlock:
    """Affine matrix-valued constraint: constant + sum_i x_i coeffs[i] >= 0."""

    constant: np.ndarray
    coeffs: np.ndarray  # (num_vars, size, size)

    def __post_init__(self):
        const = np.asarray(self.constant, dtype=float)
        coeffs = np.asarray(self.coeffs, dtype=float)
        if not np.allclose(const, const.T, atol=1e-12):
            raise ValueError("block constant must be symmetric")
        if not np.allclose(coeffs, np.transpose(coeffs, (0, 2, 1)), atol=1e-12):
            raise ValueError("block coefficients must be symmetric")
        object.__setattr__(self, "constant", const)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def size(self) -> int:
        return self.constant.shape[0]

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return self.constant + np.tensordot(x, self.coeffs, axes=1)


@dataclass(frozen=True)
class ConicProblem:
    """Canonical conic form: minimize objective . x subject to equalities,
    per-variable box bounds (inf = free), and affine PSD blocks.

    Variables are ordered (p_0..p_{N-1}, c, g) in internally rescaled
    coordinates; ``var_unscale`` maps a solution back to natural units via
    elementwise multiplication.
    """

    num_vars: int
    objective: np.ndarray
    equalities: list[tuple[np.ndarray, float]]
    lower: np.ndarray
    upper: np.ndarray
    psd_blocks: list[PsdBlock]
    var_unscale: np.ndarray

    def to_json_dict(self) -> dict:
        def mat(a):
            return np.asarray(a).tolist()

        def bounds(a):
            return [None if math.isinf(v) else v for v in a]

        return {
            "format": "crbselect-conic-v1",
            "num_vars": self.num_vars,
            "objective": mat(self.objective),
            "equalities": [{"coeffs": mat(a), "rhs": r} for a, r in self.equalities],
            "lower": bounds(self.lower),
            "upper": bounds(self.upper),
            "var_unscale": mat(self.var_unscale),
            "psd_blocks": [
                {"size": b.size, "constant": mat(b.constant), "coeffs": mat(b.coeffs)}
                for b in self.psd_blocks
            ],
        }

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh)


def build_relaxation(geometry: ArrayGeometry, m: int, grid: DeltaGrid) -> ConicProblem:
    """Assemble the relaxed program for selecting ``m`` of N sensors.

    Block coefficients come from evaluating the bound components at unit
    weight vectors, so the conic data stays consistent with the evaluator
    by construction.
    """
    n = geometry.size
    if not 2 <= m <= n:
        raise ValueError(f"selection size {m} outside [2, {n}]")
    num_vars = n + 2
    idx_c, idx_g = n, n + 1
    scale = max(1.0, float(np.abs(geometry.positions).max()))

    objective = np.zeros(num_vars)
    objective[idx_c] = 1.0

    card = np.zeros(num_vars)
    card[:n] = 1.0
    equalities = [(card, float(m))]

    lower = np.full(num_vars, -np.inf)
    upper = np.full(num_vars, np.inf)
    lower[:n] = 0.0
    upper[:n] = 1.0

    var_unscale = np.ones(num_vars)
    var_unscale[idx_c] = 1.0 / scale**2
    var_unscale[idx_g] = scale**2

    unit = np.eye(n)
    blocks = []

    # 2x2 real block [[moment2 - g, 1], [1, c]] in scaled coordinates
    coeffs = np.zeros((num_vars, 2, 2))
    for i in range(n):
        coeffs[i, 0, 0] = (geometry.positions[i] / scale) ** 2
    coeffs[idx_g, 0, 0] = -1.0
    coeffs[idx_c, 1, 1] = 1.0
    blocks.append(PsdBlock(np.array([[0.0, 1.0], [1.0, 0.0]]), coeffs))

    # one embedded 3x3 Hermitian block [[g, cross^H], [cross, gram]] per
    # separation; congruence diag(1/scale, 1, 1) keeps entries O(1)
    congr = np.array([1.0 / scale, 1.0, 1.0])
    for dw in grid.points:
        coeffs = np.zeros((num_vars, 6, 6))
        for i in range(n):
            comp = crb_components(geometry, unit[i], float(dw))
            h = np.zeros((3, 3), dtype=complex)
            h[0, 1:] = comp.cross.conj()
            h[1:, 0] = comp.cross
            h[1:, 1:] = comp.gram
            coeffs[i] = hermitian_to_real_embedding(congr[:, None] * h * congr[None, :])
        hg = np.zeros((3, 3))
        hg[0, 0] = 1.0  # g enters pre-scaled, so its congruent weight is 1
        coeffs[idx_g] = hermitian_to_real_embedding(hg)
        blocks.append(PsdBlock(np.zeros((6, 6)), coeffs))

    return ConicProblem(
        num_vars=num_vars,
        objective=objective,
        equalities=equalities,
        lower=lower,
        upper=upper,
        psd_blocks=blocks,
        var_unscale=var_unscale,
    )


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-8
    max_iter: int = 200
    verbose: bool = False


@dataclass(frozen=True)
class RelaxationResult:
    relaxed: RelaxedSelection | None
    c_star: float
    g_star: float
    status: str  # optimal | max-iterations | infeasible | numerical-failure
    primal_residual: float
    dual_residual: float
    gap: float  # relative duality gap
    iterations: int
    solver_status: str  # backend's verbatim status, for diagnostics

    @property
    def usable(self) -> bool:
        return self.relaxed is not None


def _svec(m: np.ndarray) -> np.ndarray:
    """Upper triangle stacked column-wise, off-diagonals scaled by sqrt 2
    (the solver's isometric PSD vectorization)."""
    s = m.shape[0]
    iu = np.triu_indices(s)
    # triu_indices walks row-wise; reorder to column-wise stacking
    order = np.lexsort((iu[0], iu[1]))
    rows, cols = iu[0][order], iu[1][order]
    vals = m[rows, cols].astype(float).copy()
    vals[rows != cols] *= math.sqrt(2.0)
    return vals


def _to_clarabel(problem: ConicProblem):
    rows, rhs, cones = [], [], []
    for coeffs, target in problem.equalities:
        rows.append(coeffs[None, :])
        rhs.append([target])
        cones.append(clarabel.ZeroConeT(1))

    box_rows, box_rhs = [], []
    for i in range(problem.num_vars):
        if np.isfinite(problem.lower[i]):
            row = np.zeros(problem.num_vars)
            row[i] = -1.0
            box_rows.append(row)
            box_rhs.append(-problem.lower[i])
        if np.isfinite(problem.upper[i]):
            row = np.zeros(problem.num_vars)
            row[i] = 1.0
            box_rows.append(row)
            box_rhs.append(problem.upper[i])
    if box_rows:
        rows.append(np.array(box_rows))
        rhs.append(box_rhs)
        cones.append(clarabel.NonnegativeConeT(len(box_rows)))

    for block in problem.psd_blocks:
        cols = np.stack([-_svec(block.coeffs[i]) for i in range(problem.num_vars)], axis=1)
        rows.append(cols)
        rhs.append(_svec(block.constant))
        cones.append(clarabel.PSDTriangleConeT(block.size))

    a_mat = sparse.csc_matrix(np.vstack(rows))
    b_vec = np.concatenate([np.asarray(r, dtype=float).ravel() for r in rhs])
    return a_mat, b_vec, cones


_STATUS_MAP = {
    "Solved": "optimal",
    "MaxIterations": "max-iterations",
    "MaxTime": "max-iterations",
    "PrimalInfeasible": "infeasible",
    "AlmostPrimalInfeasible": "infeasible",
}


def solve_relaxation(problem: ConicProblem, config: SolverConfig = SolverConfig()) -> RelaxationResult:
    """Solve the conic relaxation with the interior-point backend.

    The result carries the solver's convergence diagnostics verbatim;
    an ``optimal`` status certifies residuals and relative gap at or
    below 1e-7. Cardinality-saturated instances (m = N) have no strict
    interior and can stall the first attempt, so failed attempts retry
    with progressively gentler numerics before giving up.
    """
    a_mat, b_vec, cones = _to_clarabel(problem)
    p_mat = sparse.csc_matrix((problem.num_vars, problem.num_vars))

    def attempt(tol, static_reg=None, equilibrate=True):
        settings = clarabel.DefaultSettings()
        settings.verbose = config.verbose
        settings.max_iter = config.max_iter
        settings.tol_gap_abs = tol
        settings.tol_gap_rel = tol
        settings.tol_feas = tol
        settings.equilibrate_enable = equilibrate
        if static_reg is not None:
            settings.static_regularization_constant = static_reg
        solver = clarabel.DefaultSolver(p_mat, problem.objective, a_mat, b_vec,
                                        cones, settings)
        return solver.solve()

    ladder = [
        dict(tol=config.tol),
        dict(tol=max(config.tol, 1e-7)),
        dict(tol=max(config.tol, 1e-7), static_reg=1e-7),
        dict(tol=max(config.tol, 1e-7), equilibrate=False),
    ]
    sol = None
    for step, kwargs in enumerate(ladder):
        sol = attempt(**kwargs)
        raw_status = str(sol.status)
        if raw_status in ("NumericalError", "InsufficientProgress", "Unsolved"):
            if step + 1 < len(ladder):
                log.info("solver stalled (%s), retrying with %s", raw_status, kwargs)
                continue
        break

    raw_status = str(sol.status)
    gap = abs(sol.obj_val - sol.obj_val_dual) / max(1.0, abs(sol.obj_val))
    status = _STATUS_MAP.get(raw_status)
    if status is None:
        if raw_status == "AlmostSolved":
            # keep the honest label: only promote when the iterate actually
            # meets the accuracy the optimal status promises
            achieved = max(sol.r_prim, sol.r_dual, gap)
            status = "optimal" if achieved <= 1e-7 else "max-iterations"
        else:
            status = "numerical-failure"

    relaxed = None
    c_star = math.nan
    g_star = math.nan
    if status in ("optimal", "max-iterations"):
        x = np.array(sol.x) * problem.var_unscale
        n = problem.num_vars - 2
        c_star, g_star = float(x[n]), float(x[n + 1])
        target = round(problem.equalities[0][1])
        try:
            relaxed = RelaxedSelection(x[:n], target_m=target)
        except ValueError as exc:
            log.warning("solver iterate violates relaxation invariants: %s", exc)
            status = "numerical-failure"
        if max(abs(c_star), abs(g_star)) >= SOFT_BOUND:
            log.warning("solution magnitude beyond %.0e: c*=%g g*=%g",
                        SOFT_BOUND, c_star, g_star)

    return RelaxationResult(
        relaxed=relaxed,
        c_star=c_star,
        g_star=g_star,
        status=status,
        primal_residual=float(sol.r_prim),
        dual_residual=float(sol.r_dual),
        gap=float(gap),
        iterations=int(sol.iterations),
        solver_status=raw_status,
    )


@dataclass(frozen=True)
class FeasibilityReport:
    equality_residuals: np.ndarray
    box_margins: np.ndarray
    psd_margins: np.ndarray
    tol: float

    @property
    def ok(self) -> bool:
        return (
            bool(np.all(self.equality_residuals <= self.tol))
            and bool(np.all(self.box_margins >= -self.tol))
            and bool(np.all(self.psd_margins >= -self.tol))
        )


def verify_solution_feasibility(problem: ConicProblem, p, c: float, g: float,
                                tol: float = 1e-7) -> FeasibilityReport:
    """Residuals and smallest block eigenvalues for a candidate solution.

    ``p``, ``c``, ``g`` are given in natural units; block margins are
    reported in the problem's own (rescaled) coordinates.
    """
    x_nat = np.concatenate([np.asarray(p, dtype=float).ravel(), [c, g]])
    if x_nat.size != problem.num_vars:
        raise ValueError(f"expected {problem.num_vars} values, got {x_nat.size}")
    x = x_nat / problem.var_unscale
    eq = np.array([abs(coeffs @ x - rhs) for coeffs, rhs in problem.equalities])
    box = np.minimum(x - problem.lower, problem.upper - x)
    box = np.where(np.isnan(box), np.inf, box)  # free variable: both bounds inf
    psd = np.array([np.linalg.eigvalsh(b.evaluate(x)).min() for b in problem.psd_blocks])
    return FeasibilityReport(eq, box, psd, tol)
