"""Exception types raised by the toolkit.

Everything derives from RHCError so callers can catch the whole family.
Errors are grouped roughly by pipeline stage: geometry, discretization,
linear algebra, factorization, input handling.
"""


class RHCError(Exception):
    """Base class for all toolkit errors."""


# geometry / contour construction


class OverlapError(RHCError):
    """Two circles of a contour system intersect or touch."""


class OrientationError(RHCError):
    """Circle orientations admit no consistent plus/minus side labeling."""


class SingularInversionError(RHCError):
    """Circle passes through the origin; its inversion image is a line."""


class NotInversionInvariantContourError(RHCError):
    """Contour system is not closed under inversion in the unit circle."""


class CirclePackingError(RHCError):
    """No admissible radius exists for a pole circle."""


class RadiusConflictError(RHCError):
    """Requested conjugation radius collides with existing circles."""


# discretization / evaluation


class TooCloseToContourError(RHCError):
    """Evaluation point violates the quadrature safety margin."""


class AlignmentError(RHCError):
    """Grid function and operator were built on different contour systems."""


class SingularJumpError(RHCError):
    """Jump matrix is numerically singular at some node."""


class EvalError(RHCError):
    """Expression evaluation produced a non-finite value."""


class ParseError(RHCError):
    """Expression text could not be parsed."""

    def __init__(self, message: str, position: int = -1):
        super().__init__(message)
        self.position = position


# linear algebra / diagnostics


class NearSingularOperatorError(RHCError):
    """Discretized singular-integral operator is near singular."""

    def __init__(self, smallest_singular_value: float, message: str = ""):
        msg = message or (
            "operator near singular: smallest singular value "
            f"{smallest_singular_value:.3e}"
        )
        super().__init__(msg)
        self.smallest_singular_value = smallest_singular_value


class RankAmbiguityError(RHCError):
    """Singular values cluster at the rank threshold; counts unreliable."""


class WindingAmbiguityError(RHCError):
    """Accumulated phase is too far from an integer multiple of 2*pi."""


# factorization


class NonConstantCError(RHCError):
    """Matching constant of the symmetric factorization is not constant."""


class NonPositiveCError(RHCError):
    """Matching constant is not Hermitian positive definite."""


class HypothesisViolationError(RHCError):
    """Input jump fails the symmetry/positivity hypotheses of a routine."""


# scattering data


class ReflectionTooLargeError(RHCError):
    """Defocusing reflection coefficient reaches modulus one."""


class DegenerateSolitonSystemError(RHCError):
    """Closed-form soliton linear system is singular."""
