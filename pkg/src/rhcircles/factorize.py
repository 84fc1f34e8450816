"""Wiener-Hopf factorization of jump matrices.

Two constructive routes are implemented.  Scalar symbols factor through
the winding number: v = m_minus^(-1) * theta * m_plus with theta a Mobius
power carrying the index and m_pm obtained by Fourier-splitting a
continuous logarithm.  Matrix symbols are factored only in the
inversion-symmetric positive case, v = (w_plus)# w_plus, by solving the
Riemann-Hilbert problem once and normalizing with the constant Hermitian
matrix that relates the two boundary factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cauchy import (
    GridFunction,
    circle_coefficients,
    fourier_modes,
    plus_mode_mask,
    synthesize,
)
from .contour import invert_circle
from .errors import (
    HypothesisViolationError,
    NonConstantCError,
    NonPositiveCError,
    SingularJumpError,
    WindingAmbiguityError,
)
from .rhp import (
    DELTA_INV,
    JumpData,
    RHProblem,
    check_inversion_hypotheses,
    solve,
)


def winding_number(
    v: GridFunction, circle_index: int = 0, delta_inv: float = DELTA_INV
) -> int:
    """Degree of a nonvanishing scalar symbol around 0 on one circle.

    Sums principal-branch phase increments between consecutive nodes
    (cyclically); the sum is 2*pi times an integer for any continuous
    nonvanishing loop, and a result farther than 0.1 from an integer means
    the sampling is too coarse to track the phase.
    """
    samples = v.scalar()[v.system.node_slices()[circle_index]]
    if np.min(np.abs(samples)) < delta_inv:
        raise SingularJumpError(
            f"|v| < {delta_inv} on circle {circle_index}; winding undefined"
        )
    ratios = np.roll(samples, -1) / samples
    total = float(np.sum(np.angle(ratios))) / (2.0 * np.pi)
    nearest = round(total)
    if abs(total - nearest) > 0.1:
        raise WindingAmbiguityError(
            f"phase increments sum to {total:.4f} turns, not close to an "
            "integer; refine the sampling"
        )
    return int(nearest)


def mobius_power(z, exponent: int, z_plus: complex, z_minus: complex | None):
    """((z - z_plus)/(z - z_minus))^exponent, or (z - z_plus)^exponent
    when z_minus is None (the reference point pushed to infinity)."""
    z = np.asarray(z, dtype=np.complex128)
    base = z - z_plus
    if z_minus is not None:
        base = base / (z - z_minus)
    return base**exponent


def mobius_power_matrix(
    z: complex, exponents, z_plus: complex, z_minus: complex | None
) -> np.ndarray:
    """Diagonal matrix of Mobius powers, one exponent per entry."""
    return np.diag([mobius_power(z, int(k), z_plus, z_minus) for k in exponents])


def inversion_conjugate(fn):
    """Turn an evaluator f into z -> f(1/conj(z))^* (conjugate transpose)."""

    def mirrored(z: complex) -> np.ndarray:
        val = np.atleast_2d(np.asarray(fn(1.0 / np.conj(z))))
        return np.conj(val.T)

    return mirrored


def mobius_power_matrix_mirrored(
    z: complex, exponents, z_plus: complex, z_minus: complex | None
) -> np.ndarray:
    """Closed form of inversion_conjugate(mobius_power_matrix).

    Each diagonal entry becomes a Mobius power anchored at the reflected
    points 1/conj(z_plus), 1/conj(z_minus); the prefactor keeps integer
    powers single-valued.
    """
    if z_minus is None:
        base = -np.conj(z_plus) * (z - 1.0 / np.conj(z_plus)) / z
    else:
        base = (
            np.conj(z_plus)
            / np.conj(z_minus)
            * (z - 1.0 / np.conj(z_plus))
            / (z - 1.0 / np.conj(z_minus))
        )
    return np.diag([base ** int(k) for k in exponents])


@dataclass(eq=False)
class ScalarFactorization:
    """v = m_minus^(-1) * theta * m_plus on the circle.

    m_plus extends holomorphically and nonvanishing into the plus region,
    m_minus into the minus region with value 1 at infinity; theta carries
    the whole winding.
    """

    index: int
    m_plus: GridFunction
    m_minus: GridFunction
    theta: GridFunction
    z_plus: complex
    z_minus: complex | None
    residual: float

    def reassembled(self) -> GridFunction:
        return self.m_minus.inv() * self.theta * self.m_plus


def _continuous_log(samples: np.ndarray) -> np.ndarray:
    increments = np.angle(np.roll(samples, -1) / samples)
    phase = np.angle(samples[0]) + np.concatenate(
        ([0.0], np.cumsum(increments[:-1]))
    )
    return np.log(np.abs(samples)) + 1j * phase


def scalar_factorize(
    v: GridFunction,
    z_plus: complex,
    z_minus: complex | None = None,
    delta_inv: float = DELTA_INV,
) -> ScalarFactorization:
    """Factor a scalar symbol on a single circle through its winding.

    theta = ((z - z_plus)/(z - z_minus))^kappa absorbs the winding kappa,
    so log(v/theta) closes up over the circle; splitting that logarithm
    into Fourier modes analytic on either side and exponentiating yields
    the factors.  The zeroth mode goes entirely to the plus factor, which
    pins m_minus to 1 at infinity.
    """
    system = v.system
    if len(system.circles) != 1:
        raise ValueError("scalar factorization works on a single circle")
    if v.dim != 1:
        raise ValueError("scalar factorization needs a 1x1 grid function")
    circle = system.circles[0]

    kappa = winding_number(v, 0, delta_inv)
    needed = 8 * abs(kappa) + 32
    if circle.node_count < needed:
        raise ValueError(
            f"winding {kappa} needs at least {needed} nodes for branch "
            f"tracking, got {circle.node_count}"
        )
    if not system.in_omega_plus(z_plus):
        raise ValueError(f"z_plus = {z_plus} is not in the plus region")
    if z_minus is None:
        if system.plus_at_infinity:
            raise ValueError(
                "z_minus = None places the reference at infinity, which "
                "lies in the plus region of this system"
            )
    elif system.in_omega_plus(z_minus):
        raise ValueError(f"z_minus = {z_minus} is not in the minus region")

    pts = circle.points()
    theta = mobius_power(pts, kappa, z_plus, z_minus)
    g = _continuous_log(v.scalar() / theta)

    coeffs = circle_coefficients(circle, g)
    k = fourier_modes(circle.node_count)
    keep = plus_mode_mask(circle, system.plus_inside[0]) | (k == 0)
    angles = circle.angles()
    g_plus = synthesize(circle, coeffs, angles, keep)
    g_minus = synthesize(circle, coeffs, angles, ~keep)

    def as_grid(arr):
        return GridFunction(system, arr.reshape(-1, 1, 1))

    fac = ScalarFactorization(
        index=kappa,
        m_plus=as_grid(np.exp(g_plus)),
        m_minus=as_grid(np.exp(-g_minus)),
        theta=as_grid(theta),
        z_plus=z_plus,
        z_minus=z_minus,
        residual=0.0,
    )
    fac.residual = (fac.reassembled() - v).max_abs() / max(v.max_abs(), 1.0)
    return fac


@dataclass(eq=False)
class HermitianFactorization:
    """v = (w_plus)# w_plus with a constant positive normalization.

    constant_C is the Liouville constant relating the two solved boundary
    factors; sqrt_R is its Hermitian positive square root, and
    w_plus = sqrt_R * m_plus nodewise.
    """

    w_plus: GridFunction
    constant_C: np.ndarray
    sqrt_R: np.ndarray
    constancy_deviation: float
    constancy_stddev: float
    product_residual: float
    solution: object = field(repr=False, default=None)


def hermitian_factorize(
    v: JumpData,
    proj=None,
    solver=solve,
    *,
    const_tol: float = 1e-6,
    sym_tol: float = 1e-10,
) -> HermitianFactorization:
    """Factor an inversion-symmetric positive jump as (w_plus)# w_plus.

    Requires v(z) = v(1/conj(z))^* on the whole contour (Hermitian on the
    unit circle itself) and positive definiteness there; those hypotheses
    force zero partial indices, so the plain solve with h = I succeeds.
    The ratio C(z) = (m_plus(1/conj(z))^*)^(-1) m_minus(z)^(-1) extends to
    a bounded entire function, hence a constant, measured here across all
    matched node pairs; its Hermitian square root rescales m_plus into the
    final factor.
    """
    report = check_inversion_hypotheses(v, sym_tol=sym_tol)
    if not report.symmetric_off_circle:
        raise HypothesisViolationError(
            "jump is not inversion-symmetric off the unit circle "
            f"(deviation {report.max_symmetry_deviation:.2e})"
        )
    if report.hermitian_deviation_on_circle > sym_tol * max(
        1.0, v.v.max_abs()
    ):
        raise HypothesisViolationError(
            "jump is not Hermitian on the unit circle "
            f"(deviation {report.hermitian_deviation_on_circle:.2e})"
        )
    if report.min_re_eig_on_circle <= 0.0:
        raise HypothesisViolationError(
            "jump is not positive definite on the unit circle "
            f"(min eigenvalue {report.min_re_eig_on_circle:.2e})"
        )

    system = v.system
    n = v.v.dim
    sol = solver(RHProblem.from_jump(v, h=np.eye(n)), proj)

    n_minus = sol.m_minus.inv()
    partners = []
    for c in system.circles:
        img = invert_circle(c)
        partners.append(system.find_circle(img.center, img.radius))

    c_samples = []
    mirror_plus = []
    slices = system.node_slices()
    for i, c in enumerate(system.circles):
        pts = c.points()
        mirrored = 1.0 / np.conj(pts)
        j = partners[i]
        target = system.circles[j]
        angles = np.angle(mirrored - target.center)
        plus_there = sol.boundary_values(j, angles, "plus")
        mirror_plus.append(plus_there)
        sharp = np.conj(np.swapaxes(plus_there, 1, 2))
        c_samples.append(
            np.einsum("lab,lbc->lac", np.linalg.inv(sharp), n_minus.values[slices[i]])
        )
    c_all = np.concatenate(c_samples)
    c_mean = c_all.mean(axis=0)
    deviation = float(np.max(np.abs(c_all - c_mean)))
    stddev = float(np.sqrt(np.mean(np.abs(c_all - c_mean) ** 2)))
    if deviation > const_tol:
        raise NonConstantCError(
            f"normalization matrix varies by {deviation:.2e} across nodes "
            f"(tolerance {const_tol:.0e}); hypotheses or resolution failed"
        )

    c_herm = 0.5 * (c_mean + c_mean.conj().T)
    eigvals, eigvecs = np.linalg.eigh(c_herm)
    if np.min(eigvals) <= 0.0:
        raise NonPositiveCError(
            f"normalization matrix has eigenvalue {np.min(eigvals):.2e} <= 0"
        )
    sqrt_r = (eigvecs * np.sqrt(eigvals)) @ eigvecs.conj().T

    w_plus = GridFunction(
        system, np.einsum("ab,lbc->lac", sqrt_r, sol.m_plus.values)
    )

    worst = 0.0
    for i, c in enumerate(system.circles):
        sharp = np.conj(np.swapaxes(mirror_plus[i], 1, 2))
        product = np.einsum(
            "lab,bc,lcd->lad", sharp, c_herm, sol.m_plus.values[slices[i]]
        )
        gap = v.v.values[slices[i]] - product
        worst = max(worst, float(np.max(np.abs(gap))))

    return HermitianFactorization(
        w_plus=w_plus,
        constant_C=c_herm,
        sqrt_R=sqrt_r,
        constancy_deviation=deviation,
        constancy_stddev=stddev,
        product_residual=worst,
        solution=sol,
    )
