"""Numerical solver and factorization toolkit for matrix jump problems
posed on systems of circles with the 1/conj(z) inversion symmetry."""

from .cauchy import (
    CauchyProjectors,
    GridFunction,
    apply_minus,
    apply_plus,
    boundary_values_on_circle,
    build_projectors,
    cauchy_offcontour,
)
from .contour import (
    CCW,
    CW,
    Circle,
    ContourSystem,
    build_contour,
    invert_circle,
    off_contour_points,
    unit_circle,
)
from .errors import (
    AlignmentError,
    CirclePackingError,
    DegenerateSolitonSystemError,
    EvalError,
    HypothesisViolationError,
    NearSingularOperatorError,
    NonConstantCError,
    NonPositiveCError,
    NotInversionInvariantContourError,
    OrientationError,
    OverlapError,
    ParseError,
    RadiusConflictError,
    RankAmbiguityError,
    ReflectionTooLargeError,
    RHCError,
    SingularInversionError,
    SingularJumpError,
    TooCloseToContourError,
    WindingAmbiguityError,
)
from .expressions import parse_expression
from .factorize import (
    HermitianFactorization,
    ScalarFactorization,
    hermitian_factorize,
    inversion_conjugate,
    mobius_power,
    mobius_power_matrix,
    mobius_power_matrix_mirrored,
    scalar_factorize,
    winding_number,
)
from .idnls import (
    AugmentedProblem,
    IdnlsSolution,
    IdnlsSpec,
    SolitonOracle,
    build_defocusing_jump,
    build_focusing_jump,
    conjugate,
    conjugation_matrices,
    default_pole_radii,
    remove_poles,
    residue_condition_residuals,
    solve_augmented,
    soliton_oracle,
)
from .rhp import (
    DELTA_INV,
    SIGMA_MIN,
    TAU_RANK,
    FactorizationData,
    IndexReport,
    InversionReport,
    JumpData,
    RHProblem,
    RHSolution,
    check_inversion_hypotheses,
    evaluate_m,
    index_diagnostics,
    solve,
    trivial_splitting,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentError",
    "apply_minus",
    "apply_plus",
    "AugmentedProblem",
    "boundary_values_on_circle",
    "build_contour",
    "build_defocusing_jump",
    "build_focusing_jump",
    "build_projectors",
    "cauchy_offcontour",
    "CauchyProjectors",
    "CCW",
    "check_inversion_hypotheses",
    "Circle",
    "CirclePackingError",
    "conjugate",
    "conjugation_matrices",
    "ContourSystem",
    "CW",
    "default_pole_radii",
    "DegenerateSolitonSystemError",
    "DELTA_INV",
    "evaluate_m",
    "EvalError",
    "FactorizationData",
    "GridFunction",
    "hermitian_factorize",
    "HermitianFactorization",
    "HypothesisViolationError",
    "IdnlsSolution",
    "IdnlsSpec",
    "index_diagnostics",
    "IndexReport",
    "inversion_conjugate",
    "InversionReport",
    "invert_circle",
    "JumpData",
    "mobius_power",
    "mobius_power_matrix",
    "mobius_power_matrix_mirrored",
    "NearSingularOperatorError",
    "NonConstantCError",
    "NonPositiveCError",
    "NotInversionInvariantContourError",
    "off_contour_points",
    "OrientationError",
    "OverlapError",
    "parse_expression",
    "ParseError",
    "RadiusConflictError",
    "RankAmbiguityError",
    "ReflectionTooLargeError",
    "remove_poles",
    "residue_condition_residuals",
    "RHCError",
    "RHProblem",
    "RHSolution",
    "scalar_factorize",
    "ScalarFactorization",
    "SIGMA_MIN",
    "SingularInversionError",
    "SingularJumpError",
    "solve",
    "solve_augmented",
    "soliton_oracle",
    "SolitonOracle",
    "TAU_RANK",
    "TooCloseToContourError",
    "trivial_splitting",
    "unit_circle",
    "WindingAmbiguityError",
    "winding_number",
]
