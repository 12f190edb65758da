"""Worst-case two-target CRB sensor selection for linear arrays."""

__version__ = "0.1.0"

from .model import (
    ArrayGeometry,
    CrbComponents,
    DeltaGrid,
    RelaxedSelection,
    Selection,
    crb_components,
    make_default_grid,
    make_ula,
)
from .crb import (
    CrbParams,
    NumericalConsistencyError,
    crb_over_grid,
    projection_oracle_crb,
    single_target_crb,
    two_target_crb,
    worst_case_crb,
)
from .relaxation import (
    ConicProblem,
    FeasibilityReport,
    PsdBlock,
    RelaxationResult,
    SolverConfig,
    build_relaxation,
    hermitian_to_real_embedding,
    solve_relaxation,
    verify_solution_feasibility,
)
from .rounding import (
    RoundedResult,
    RoundingConfig,
    randomized_round,
    round_by_top_m,
    round_selection,
    trial_selection,
)
from .baselines import edge_selection, exhaustive_best, random_selection

__all__ = [
    "ArrayGeometry",
    "ConicProblem",
    "CrbComponents",
    "CrbParams",
    "DeltaGrid",
    "FeasibilityReport",
    "NumericalConsistencyError",
    "PsdBlock",
    "RelaxationResult",
    "RelaxedSelection",
    "RoundedResult",
    "RoundingConfig",
    "Selection",
    "SolverConfig",
    "build_relaxation",
    "crb_components",
    "crb_over_grid",
    "edge_selection",
    "exhaustive_best",
    "hermitian_to_real_embedding",
    "make_default_grid",
    "make_ula",
    "projection_oracle_crb",
    "random_selection",
    "randomized_round",
    "round_by_top_m",
    "round_selection",
    "single_target_crb",
    "solve_relaxation",
    "trial_selection",
    "two_target_crb",
    "verify_solution_feasibility",
    "worst_case_crb",
]
