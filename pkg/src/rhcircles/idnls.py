"""Riemann-Hilbert problems modeled on the integrable discrete NLS lattice.

The inverse problem data are a reflection coefficient r on the unit
circle, a lattice site n, and pole pairs (z_j, 1/conj(z_j)) outside/inside
the unit circle with norming constants c_j.  Residue conditions at the
poles are traded for jump conditions on small circles (pole removal), and
a further region-wise conjugation produces a jump that is
inversion-symmetric off the unit circle and positive Hermitian on it, so
the solver applies with zero partial indices.  Each transformation carries
an undo map; composing solve with undo recovers the original unknown with
its poles.

Conventions: the unit circle is oriented clockwise (plus side outside),
pole circles clockwise, their inverted images counterclockwise, and the
auxiliary circles at radii R and 1/R counterclockwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .contour import (
    CCW,
    CW,
    Circle,
    ContourSystem,
    build_contour,
    invert_circle,
    unit_circle,
)
from .errors import (
    CirclePackingError,
    DegenerateSolitonSystemError,
    RadiusConflictError,
    ReflectionTooLargeError,
)
from .rhp import JumpData, RHProblem, RHSolution, evaluate_m, solve

FOCUSING = "focusing"
DEFOCUSING = "defocusing"

_SAMPLE_COUNT = 256


def _zero_reflection(z: complex) -> complex:
    return 0.0


@dataclass(frozen=True)
class IdnlsSpec:
    """Scattering-style data: reflection coefficient, lattice site, poles.

    r is a closed-form evaluator on the unit circle (None means zero);
    n is the lattice index entering the z^(2n) twists; poles is a sequence
    of (z_j, c_j) with |z_j| > 1 pairwise distinct.  The defocusing sign
    requires sup |r| < 1 on the circle, which is what makes the real part
    of the jump positive definite.
    """

    r: Callable | None
    n: int
    poles: tuple = ()
    sign: str = FOCUSING

    def __post_init__(self):
        if self.sign not in (FOCUSING, DEFOCUSING):
            raise ValueError(f"sign must be focusing or defocusing: {self.sign}")
        poles = tuple((complex(z), complex(c)) for z, c in self.poles)
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "n", int(self.n))
        for z, _ in poles:
            if abs(z) <= 1.0:
                raise ValueError(f"pole {z} is not outside the unit circle")
        locations = [z for z, _ in poles]
        for i in range(len(locations)):
            for k in range(i + 1, len(locations)):
                if locations[i] == locations[k]:
                    raise ValueError(f"duplicate pole {locations[i]}")
        if self.sign == DEFOCUSING:
            worst = max(abs(self.reflection(z)) for z in _unit_samples())
            if worst >= 1.0:
                raise ReflectionTooLargeError(
                    f"defocusing data needs sup|r| < 1, sampled {worst:.4f}"
                )

    @property
    def reflection(self) -> Callable:
        return self.r if self.r is not None else _zero_reflection

    def pole_locations(self) -> np.ndarray:
        return np.array([z for z, _ in self.poles], dtype=np.complex128)

    def mirror_locations(self) -> np.ndarray:
        return 1.0 / np.conj(self.pole_locations())


def _unit_samples(count: int = _SAMPLE_COUNT) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(count) / count)


def _unit_jump_evaluator(spec: IdnlsSpec) -> Callable:
    r, n = spec.reflection, spec.n
    if spec.sign == DEFOCUSING:

        def v(z: complex) -> np.ndarray:
            rv = r(z)
            return np.array(
                [
                    [1.0 - rv * np.conj(rv), -(z**(2 * n)) * np.conj(rv)],
                    [z ** (-2 * n) * rv, 1.0],
                ],
                dtype=np.complex128,
            )

    else:

        def v(z: complex) -> np.ndarray:
            rv = r(z)
            return np.array(
                [
                    [1.0 + rv * np.conj(rv), z ** (2 * n) * np.conj(rv)],
                    [z ** (-2 * n) * rv, 1.0],
                ],
                dtype=np.complex128,
            )

    return v


def build_defocusing_jump(spec: IdnlsSpec, node_count: int = 64) -> JumpData:
    """Jump matrix with Re v = diag(1 - |r|^2, 1) on the clockwise circle."""
    if spec.sign != DEFOCUSING:
        raise ValueError("spec.sign must be defocusing")
    worst = max(abs(spec.reflection(z)) for z in _unit_samples())
    if worst >= 1.0:
        raise ReflectionTooLargeError(
            f"defocusing jump needs sup|r| < 1, sampled {worst:.4f}"
        )
    system = build_contour([unit_circle(CW, node_count)])
    return JumpData.from_evaluator(system, _unit_jump_evaluator(spec))


def build_focusing_jump(spec: IdnlsSpec, node_count: int = 64) -> JumpData:
    """Hermitian positive jump with det = 1 on the clockwise circle."""
    if spec.sign != FOCUSING:
        raise ValueError("spec.sign must be focusing")
    system = build_contour([unit_circle(CW, node_count)])
    return JumpData.from_evaluator(system, _unit_jump_evaluator(spec))


def _norming_factors(spec: IdnlsSpec) -> tuple[np.ndarray, np.ndarray]:
    """Residue coefficients q_j at the poles and their mirror partners."""
    z = spec.pole_locations()
    c = np.array([cj for _, cj in spec.poles], dtype=np.complex128)
    q = z ** (-2 * spec.n) * c
    gamma = np.conj(z) ** (-2 * spec.n - 2) * np.conj(c)
    return q, gamma


def default_pole_radii(spec: IdnlsSpec) -> np.ndarray:
    """Half the clearance of each pole from the unit circle, the other
    poles (half again, so neighboring circles cannot meet), and the
    mirror points."""
    z = spec.pole_locations()
    mirrors = spec.mirror_locations()
    radii = np.empty(len(z))
    for j, zj in enumerate(z):
        bounds = [abs(zj) - 1.0]
        for k, zk in enumerate(z):
            if k != j:
                bounds.append(abs(zj - zk) / 2.0)
        bounds.extend(abs(zj - w) for w in mirrors)
        radii[j] = 0.5 * min(bounds)
    return radii


@dataclass(eq=False)
class AugmentedProblem:
    """Pole-free contour problem equivalent to the residue-condition one.

    roles records what each circle is (unit / pole j / inverted-pole j /
    outer / inner); undo maps a solved value m(z) at an off-contour point
    back to the original unknown with its poles restored.
    """

    system: ContourSystem
    jump: JumpData
    roles: tuple
    spec: IdnlsSpec
    undo: Callable
    pole_radii: tuple = ()

    def role_index(self, *role) -> int:
        return self.roles.index(tuple(role))

    def is_conjugated(self) -> bool:
        return ("outer",) in self.roles


def _check_packing(circles: Sequence[Circle]) -> None:
    # Curves must be pairwise disjoint: either separated or strictly
    # nested (inverted-pole circles sit inside the unit circle).
    for i in range(len(circles)):
        for k in range(i + 1, len(circles)):
            a, b = circles[i], circles[k]
            d = abs(a.center - b.center)
            if not (d > a.radius + b.radius or d < abs(a.radius - b.radius)):
                raise CirclePackingError(
                    f"circles {i} and {k} (centers {a.center}, {b.center}, "
                    f"radii {a.radius}, {b.radius}) intersect; shrink the "
                    "pole radii"
                )


def remove_poles(
    spec: IdnlsSpec,
    radii: Sequence[float] | None = None,
    pole_nodes: int = 64,
    unit_nodes: int = 64,
) -> AugmentedProblem:
    """Trade residue conditions for jumps on small circles around poles.

    The unknown is redefined inside each small circle so that the pole
    cancels; the price is a triangular jump on the circle.  Inverted-image
    circles carry the mirrored conditions.  The undo map multiplies the
    solved function back by the triangular factors inside those circles.
    """
    j_count = len(spec.poles)
    z = spec.pole_locations()
    mirrors = spec.mirror_locations()
    q, gamma = _norming_factors(spec)

    if radii is None:
        rho = default_pole_radii(spec)
    else:
        rho = np.asarray([float(r) for r in radii])
        if rho.shape != (j_count,):
            raise ValueError(f"need {j_count} radii, got {rho.shape}")
    if np.any(rho <= 0.0):
        raise CirclePackingError("pole circle radii must be positive")

    circles = [unit_circle(CW, unit_nodes)]
    roles = [("unit",)]
    fns = [_unit_jump_evaluator(spec)]

    def lower_jump(j: int) -> Callable:
        def v(w: complex) -> np.ndarray:
            return np.array(
                [[1.0, 0.0], [q[j] / (w - z[j]), 1.0]], dtype=np.complex128
            )

        return v

    def upper_jump(j: int) -> Callable:
        def v(w: complex) -> np.ndarray:
            return np.array(
                [[1.0, -gamma[j] / (w - mirrors[j])], [0.0, 1.0]],
                dtype=np.complex128,
            )

        return v

    pole_circles = []
    for j in range(j_count):
        pc = Circle(z[j], float(rho[j]), CW, pole_nodes)
        pole_circles.append(pc)
        circles.append(pc)
        roles.append(("pole", j))
        fns.append(lower_jump(j))
    for j in range(j_count):
        circles.append(invert_circle(pole_circles[j]))
        roles.append(("inverted-pole", j))
        fns.append(upper_jump(j))

    _check_packing(circles)
    system = build_contour(circles)
    jump = JumpData.from_evaluators(system, fns)

    lowers = [lower_jump(j) for j in range(j_count)]
    uppers = [upper_jump(j) for j in range(j_count)]
    inv_radii = [c.radius for c in circles[1 + j_count :]]
    inv_centers = [c.center for c in circles[1 + j_count :]]

    def undo(w: complex, value: np.ndarray) -> np.ndarray:
        for j in range(j_count):
            if abs(w - z[j]) < rho[j]:
                return value @ lowers[j](w)
            if abs(w - inv_centers[j]) < inv_radii[j]:
                return value @ np.linalg.inv(uppers[j](w))
        return value

    return AugmentedProblem(
        system=system,
        jump=jump,
        roles=tuple(roles),
        spec=spec,
        undo=undo,
        pole_radii=tuple(float(r) for r in rho),
    )


def conjugation_matrices(spec: IdnlsSpec):
    """The region-wise factors (A, B_j list, C) used by conjugate()."""
    z = spec.pole_locations()
    prod = complex(np.prod(z)) if len(z) else 1.0 + 0.0j
    q, _ = _norming_factors(spec)

    def a_mat(w: complex) -> np.ndarray:
        return np.array([[prod, 0.0], [0.0, w]], dtype=np.complex128)

    def c_mat(w: complex) -> np.ndarray:
        return np.array(
            [[1.0 / np.conj(prod), 0.0], [0.0, w]], dtype=np.complex128
        )

    def b_mat(j: int) -> Callable:
        beta = prod / z[j] * q[j]

        def mat(w: complex) -> np.ndarray:
            return np.array([[prod, 0.0], [-beta, w]], dtype=np.complex128)

        return mat

    return a_mat, [b_mat(j) for j in range(len(z))], c_mat


def conjugate(
    ap: AugmentedProblem,
    radius: float | None = None,
    node_count: int = 64,
) -> AugmentedProblem:
    """Conjugate the augmented problem into the symmetric positive form.

    Two counterclockwise circles at radii R and 1/R are added and the
    unknown is multiplied region-wise by A, B_j or C.  The resulting jump
    equals its own inversion-conjugate off the unit circle and is positive
    Hermitian on it, so the solvability theorem applies directly.  The
    returned undo composes the conjugation undo with the pole-restoring
    undo of the input.
    """
    if ap.is_conjugated():
        raise ValueError("problem is already conjugated")
    spec = ap.spec
    j_count = len(spec.poles)
    z = spec.pole_locations()
    mirrors = spec.mirror_locations()
    rho = np.asarray(ap.pole_radii)
    q, gamma = _norming_factors(spec)
    prod = complex(np.prod(z)) if j_count else 1.0 + 0.0j

    big_r = float(radius) if radius is not None else 2.0 * max(
        [abs(w) for w in z], default=1.0
    )
    if j_count and big_r <= max(abs(w) for w in z):
        raise RadiusConflictError(
            f"outer radius {big_r} does not exceed the largest pole modulus"
        )
    if j_count and big_r <= max(abs(z[j]) + rho[j] for j in range(j_count)):
        raise RadiusConflictError(
            f"outer circle of radius {big_r} meets a pole circle"
        )
    if big_r <= 1.0:
        raise RadiusConflictError(f"outer radius {big_r} must exceed 1")
    inner_clearance = [
        abs(c.center) - c.radius
        for c, role in zip(ap.system.circles, ap.roles)
        if role[0] == "inverted-pole"
    ]
    if inner_clearance and 1.0 / big_r >= min(inner_clearance):
        raise RadiusConflictError(
            f"inner circle of radius {1.0 / big_r} meets an inverted pole "
            "circle"
        )

    a_mat, b_mats, c_mat = conjugation_matrices(spec)
    unit_v = _unit_jump_evaluator(spec)

    def unit_jump(w: complex) -> np.ndarray:
        a = a_mat(w)
        a_star = np.array(
            [[np.conj(prod), 0.0], [0.0, 1.0 / w]], dtype=np.complex128
        )
        return a_star @ unit_v(w) @ a

    def outer_jump(w: complex) -> np.ndarray:
        return a_mat(w)

    def inner_jump(w: complex) -> np.ndarray:
        return np.array(
            [[np.conj(prod), 0.0], [0.0, 1.0 / w]], dtype=np.complex128
        )

    def pole_jump(j: int) -> Callable:
        kappa = prod / z[j] * q[j]

        def v(w: complex) -> np.ndarray:
            return np.array(
                [[1.0, 0.0], [kappa / (w - z[j]), 1.0]], dtype=np.complex128
            )

        return v

    def mirror_jump(j: int) -> Callable:
        lam = np.conj(prod) * gamma[j]

        def v(w: complex) -> np.ndarray:
            return np.array(
                [[1.0, -w * lam / (w - mirrors[j])], [0.0, 1.0]],
                dtype=np.complex128,
            )

        return v

    circles = list(ap.system.circles) + [
        Circle(0j, big_r, CCW, node_count),
        Circle(0j, 1.0 / big_r, CCW, node_count),
    ]
    roles = list(ap.roles) + [("outer",), ("inner",)]
    fns = []
    for role in ap.roles:
        if role == ("unit",):
            fns.append(unit_jump)
        elif role[0] == "pole":
            fns.append(pole_jump(role[1]))
        else:
            fns.append(mirror_jump(role[1]))
    fns.extend([outer_jump, inner_jump])

    system = build_contour(circles)
    jump = JumpData.from_evaluators(system, fns)

    def conjugation_factor(w: complex) -> np.ndarray | None:
        mod = abs(w)
        if mod >= big_r or mod <= 1.0 / big_r:
            return None
        for j in range(j_count):
            if abs(w - z[j]) < rho[j]:
                return b_mats[j](w)
        if mod > 1.0:
            return a_mat(w)
        return c_mat(w)

    def undo(w: complex, value: np.ndarray) -> np.ndarray:
        factor = conjugation_factor(w)
        if factor is not None:
            value = value @ np.linalg.inv(factor)
        return ap.undo(w, value)

    return AugmentedProblem(
        system=system,
        jump=jump,
        roles=tuple(roles),
        spec=spec,
        undo=undo,
        pole_radii=ap.pole_radii,
    )


@dataclass(eq=False)
class SolitonOracle:
    """Closed-form reflectionless solution from a finite linear system.

    The partial-fraction ansatz I + sum_j (a_j e1^T/(z - z_j)
    + b_j e2^T/(z - 1/conj(z_j))) turns the residue conditions into a
    2J x 2J linear system for the vectors a_j, b_j.
    """

    poles: np.ndarray
    mirrors: np.ndarray
    pole_residues: np.ndarray
    mirror_residues: np.ndarray

    def __call__(self, z: complex) -> np.ndarray:
        out = np.eye(2, dtype=np.complex128)
        for j in range(len(self.poles)):
            out[:, 0] += self.pole_residues[j] / (z - self.poles[j])
            out[:, 1] += self.mirror_residues[j] / (z - self.mirrors[j])
        return out


def soliton_oracle(spec: IdnlsSpec) -> SolitonOracle:
    """Exact reflectionless solution used to validate the solver pipeline."""
    if not spec.poles:
        raise ValueError("soliton oracle needs at least one pole")
    if spec.r is not None:
        worst = max(abs(spec.r(w)) for w in _unit_samples())
        if worst > 1e-14:
            raise ValueError(
                f"soliton oracle needs zero reflection, sampled sup {worst:.2e}"
            )
    j_count = len(spec.poles)
    z = spec.pole_locations()
    mirrors = spec.mirror_locations()
    q, gamma = _norming_factors(spec)

    k1 = q[:, None] / (z[:, None] - mirrors[None, :])
    k2 = gamma[:, None] / (mirrors[:, None] - z[None, :])
    mat = np.block(
        [
            [np.eye(j_count), -k1],
            [-k2, np.eye(j_count)],
        ]
    ).astype(np.complex128)
    rhs = np.zeros((2 * j_count, 2), dtype=np.complex128)
    rhs[j_count:, 0] = gamma
    rhs[:j_count, 1] = q

    svals = np.linalg.svd(mat, compute_uv=False)
    if svals[-1] < 1e-12 * svals[0]:
        raise DegenerateSolitonSystemError(
            f"residue system is singular (sigma_min/sigma_max = "
            f"{svals[-1] / svals[0]:.2e})"
        )
    x = np.linalg.solve(mat, rhs)
    return SolitonOracle(
        poles=z,
        mirrors=mirrors,
        pole_residues=x[:j_count],
        mirror_residues=x[j_count:],
    )


@dataclass(eq=False)
class IdnlsSolution:
    """Solved augmented problem together with its undo map."""

    augmented: AugmentedProblem
    solution: RHSolution

    @property
    def residual_jump(self) -> float:
        return self.solution.residual_jump

    @property
    def smallest_singular_value(self) -> float:
        return self.solution.smallest_singular_value

    def evaluate(self, z: complex, margin_factor: float = 0.5) -> np.ndarray:
        """Original unknown M(z), poles restored, at an off-contour point."""
        return self.augmented.undo(
            z, evaluate_m(self.solution, z, margin_factor)
        )


def solve_augmented(
    ap: AugmentedProblem, proj=None, **solve_options
) -> IdnlsSolution:
    problem = RHProblem.from_jump(ap.jump, h=np.eye(2))
    return IdnlsSolution(ap, solve(problem, proj, **solve_options))


def residue_condition_residuals(
    evaluate: Callable,
    ap: AugmentedProblem,
    quad_points: int = 48,
) -> float:
    """Worst deviation from the residue conditions at all pole pairs.

    Residues and regular parts are extracted by trapezoid quadrature on
    circles of half the removal radius; the condition compares the residue
    against the limit of M times the rank-one coefficient matrix.
    """
    spec = ap.spec
    z = spec.pole_locations()
    mirrors = spec.mirror_locations()
    q, gamma = _norming_factors(spec)
    rho = np.asarray(ap.pole_radii)
    worst = 0.0
    for j in range(len(z)):
        inverted = invert_circle(Circle(z[j], float(rho[j]), CW))
        mirror_clearance = inverted.radius - abs(mirrors[j] - inverted.center)
        for center, coeff, col in (
            (z[j], q[j], 0),
            (mirrors[j], gamma[j], 1),
        ):
            radius = 0.5 * rho[j] if col == 0 else 0.5 * mirror_clearance
            ring = center + radius * np.exp(
                2j * np.pi * np.arange(quad_points) / quad_points
            )
            vals = np.stack([evaluate(complex(w)) for w in ring])
            residue = np.einsum("l,lab->ab", ring - center, vals) / quad_points
            regular = vals.mean(axis=0)
            rank_one = np.zeros((2, 2), dtype=np.complex128)
            rank_one[1 - col, col] = coeff
            gap = residue - regular @ rank_one
            worst = max(worst, float(np.max(np.abs(gap))))
    return worst
