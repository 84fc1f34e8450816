import numpy as np
import pytest
from hypothesis import given, strategies as st

import rhcircles as rc

from conftest import rational_exact


def test_trivial_splitting_identity(unit_ccw_64):
    v = rc.JumpData.from_evaluator(unit_ccw_64, lambda z: np.eye(1))
    data = rc.trivial_splitting(v, "plus")
    assert np.max(np.abs(data.w_plus.values)) == 0.0
    assert np.max(np.abs(data.w_minus.values)) == 0.0


def test_trivial_splitting_minus_side(unit_ccw_64):
    v = rc.JumpData.from_evaluator(unit_ccw_64, lambda z: np.diag([2.0, 1.0]))
    data = rc.trivial_splitting(v, "minus")
    assert np.allclose(data.w_minus.values[0], np.diag([0.5, 0.0]))
    assert np.max(np.abs(data.w_plus.values)) == 0.0


@given(st.sampled_from(["plus", "minus"]))
def test_splitting_reassembles_jump(rational_radius6, side):
    _, jump = rational_radius6
    data = rc.trivial_splitting(jump, side)
    v_back = data.b_minus().inv() * data.b_plus()
    assert np.max(np.abs(v_back.values - jump.v.values)) < 1e-12


def test_singular_jump_rejected(unit_ccw_64):
    with pytest.raises(rc.SingularJumpError):
        rc.JumpData.from_evaluator(unit_ccw_64, lambda z: np.array([[z - 1.0]]))


def test_identity_jump_solution_is_constant(unit_ccw_64):
    v = rc.JumpData.from_evaluator(unit_ccw_64, lambda z: np.eye(2))
    h = np.array([[2.0, 1.0], [0.0, 1.0]], dtype=complex)
    sol = rc.solve(rc.RHProblem.from_jump(v, h=h))
    assert sol.residual_jump < 1e-14
    for z in (0.0, 0.3 + 0.4j, 5.0):
        assert np.max(np.abs(sol.evaluate(z) - h)) < 1e-13


def test_rational_jump_matches_closed_form(rational_radius6):
    system, jump = rational_radius6
    sol = rc.solve(rc.RHProblem.from_jump(jump))
    probes = rc.off_contour_points(system, 30, rel_margin=0.35, r_min=0.5, r_max=20.0)
    for z in probes:
        assert abs(sol.evaluate(z)[0, 0] - rational_exact(z)) < 1e-10
    assert sol.residual_jump < 1e-12
    assert sol.smallest_singular_value > 0.1


def test_solution_independent_of_splitting_side(rational_radius6):
    system, jump = rational_radius6
    sol_p = rc.solve(rc.RHProblem.from_jump(jump, side="plus"))
    sol_m = rc.solve(rc.RHProblem.from_jump(jump, side="minus"))
    probes = rc.off_contour_points(system, 20, rel_margin=0.35, r_min=0.5, r_max=20.0)
    dev = max(
        float(np.max(np.abs(sol_p.evaluate(z) - sol_m.evaluate(z))))
        for z in probes
    )
    assert dev < 1e-8


@given(
    st.complex_numbers(
        min_magnitude=0.1, max_magnitude=4.0, allow_nan=False, allow_infinity=False
    )
)
def test_solution_linear_in_normalization(rational_radius6, h_scale):
    _, jump = rational_radius6
    base = rc.solve(rc.RHProblem.from_jump(jump))
    scaled = rc.solve(
        rc.RHProblem.from_jump(jump, h=np.array([[h_scale]]))
    )
    dev = np.max(np.abs(scaled.mu.values - h_scale * base.mu.values))
    assert dev < 1e-10 * max(abs(h_scale), 1.0)


def test_solution_in_range_of_projections(rational_radius6):
    # mu b_plus - h extends to the plus side, mu b_minus - h to the minus
    # side; membership is certified by the complementary projection
    system, jump = rational_radius6
    p = rc.RHProblem.from_jump(jump)
    sol = rc.solve(p)
    proj = rc.build_projectors(system)
    h = rc.GridFunction.constant(system, sol.h)
    plus_part = sol.m_plus - h
    minus_part = sol.m_minus - h
    leak_plus = rc.apply_minus(proj, plus_part)
    leak_minus = rc.apply_plus(proj, minus_part)
    assert np.max(np.abs(leak_plus.values)) < 1e-10
    assert np.max(np.abs(leak_minus.values)) < 1e-10


def test_boundary_relation_and_residual(rational_radius6):
    _, jump = rational_radius6
    sol = rc.solve(rc.RHProblem.from_jump(jump))
    # m_pm = mu b_pm holds exactly by construction
    data = sol.problem.data
    assert np.max(np.abs(sol.m_plus.values - (sol.mu * data.b_plus()).values)) == 0.0
    assert np.max(np.abs(sol.m_minus.values - (sol.mu * data.b_minus()).values)) == 0.0
    # and the recorded midpoint residual is an honest upper indicator
    assert 0.0 <= sol.residual_jump < 1e-12


def test_winding_one_jump_is_near_singular():
    system = rc.build_contour([rc.Circle(0j, 1.0, rc.CCW, 128)])
    v = rc.JumpData.from_evaluator(system, lambda z: np.array([[z]]))
    with pytest.raises(rc.NearSingularOperatorError) as info:
        rc.solve(rc.RHProblem.from_jump(v))
    assert info.value.smallest_singular_value < 1e-8


def test_rational_jump_on_unit_circle_is_near_singular():
    # with only one of the two anchors enclosed the symbol winds once and
    # the operator has a genuine one-dimensional kernel
    system = rc.build_contour([rc.Circle(0j, 1.0, rc.CCW, 128)])
    v = rc.JumpData.from_evaluator(
        system, lambda z: np.array([[(z - 0.4) / (z - 2.5)]])
    )
    with pytest.raises(rc.NearSingularOperatorError):
        rc.solve(rc.RHProblem.from_jump(v))
    rep = rc.index_diagnostics(rc.RHProblem.from_jump(v))
    assert (rep.dim_ker, rep.dim_coker) == (1, 0)


@pytest.mark.parametrize("kappa", [-2, -1, 0, 1, 2])
def test_monomial_jump_index(kappa):
    system = rc.build_contour([rc.Circle(0j, 1.0, rc.CCW, 64)])
    v = rc.JumpData.from_evaluator(system, lambda z: np.array([[z**kappa]]))
    rep = rc.index_diagnostics(rc.RHProblem.from_jump(v))
    assert rep.dim_ker == max(kappa, 0)
    assert rep.dim_coker == max(-kappa, 0)


def test_kernel_cokernel_duality_under_inversion():
    # dim Coker for the jump v equals dim Ker for z -> v(1/conj(z))^*
    system = rc.build_contour([rc.Circle(0j, 1.0, rc.CCW, 64)])
    for kappa in (-2, 1):
        v = rc.JumpData.from_evaluator(system, lambda z: np.array([[z**kappa]]))
        v_sharp = rc.JumpData.from_evaluator(
            system, rc.inversion_conjugate(lambda z: np.array([[z**kappa]]))
        )
        rep = rc.index_diagnostics(rc.RHProblem.from_jump(v))
        rep_sharp = rc.index_diagnostics(rc.RHProblem.from_jump(v_sharp))
        assert rep.dim_coker == rep_sharp.dim_ker
        assert rep.dim_ker == rep_sharp.dim_coker


def test_block_triangular_jump_solves():
    # one lower-triangular jump on a small circle: the solution must pick
    # up exactly the Cauchy kernel of the off-diagonal entry
    circle = rc.Circle(2.0 + 0j, 0.5, rc.CW, 32)
    system = rc.build_contour([circle])
    q = 0.7
    v = rc.JumpData.from_evaluator(
        system, lambda z: np.array([[1.0, 0.0], [q / (z - 2.0), 1.0]])
    )
    sol = rc.solve(rc.RHProblem.from_jump(v))
    # outside the circle m = I + q E21 / (z - 2), inside m = I
    far = sol.evaluate(4.0 + 0j)
    want = np.eye(2, dtype=complex)
    want[1, 0] = q / (4.0 - 2.0)
    assert np.max(np.abs(far - want)) < 1e-12
    assert np.max(np.abs(sol.evaluate(2.1 + 0j) - np.eye(2))) < 1e-12


def test_spectral_convergence_on_nontrivial_symbol():
    # zeros and poles at distance ratio 0.8 from the circle force visible
    # spectral decay before the rounding floor
    def v_fn(z):
        return np.array([[((z - 0.8) * (z - 1.25)) / ((z - 0.7) * (z - 1.4))]])

    residuals = []
    for m in (16, 32, 64, 128, 256):
        system = rc.build_contour([rc.Circle(0j, 1.0, rc.CCW, m)])
        sol = rc.solve(rc.RHProblem.from_jump(rc.JumpData.from_evaluator(system, v_fn)))
        residuals.append(sol.residual_jump)
    # density tails decay like 0.8^(m/2), so each doubling must win big
    for coarse, fine in zip(residuals, residuals[1:]):
        assert fine <= max(0.2 * coarse, 1e-13)
    assert residuals[-1] < 1e-11


def test_symmetry_check_requires_unit_circle():
    system = rc.build_contour([rc.Circle(0j, 2.0, rc.CCW, 32)])
    v = rc.JumpData.from_evaluator(system, lambda z: np.eye(2))
    with pytest.raises(rc.NotInversionInvariantContourError):
        rc.check_inversion_hypotheses(v)


def test_symmetry_check_requires_mirror_partners():
    system = rc.build_contour(
        [rc.Circle(0j, 1.0, rc.CW, 32), rc.Circle(3.0 + 0j, 0.5, rc.CW, 32)]
    )
    v = rc.JumpData.from_evaluator(system, lambda z: np.eye(2))
    with pytest.raises(rc.NotInversionInvariantContourError):
        rc.check_inversion_hypotheses(v)


def test_symmetry_check_flags_asymmetric_jump():
    mirror = rc.invert_circle(rc.Circle(3.0 + 0j, 0.5, rc.CW, 32))
    system = rc.build_contour(
        [
            rc.Circle(0j, 1.0, rc.CW, 32),
            rc.Circle(3.0 + 0j, 0.5, rc.CW, 32),
            mirror,
        ]
    )
    fns = [
        lambda z: np.eye(2),
        lambda z: np.array([[1.0, 0.3], [0.0, 1.0]]),
        lambda z: np.eye(2),  # should be the conjugate transpose instead
    ]
    v = rc.JumpData.from_evaluators(system, fns)
    rep = rc.check_inversion_hypotheses(v)
    assert not rep.symmetric_off_circle
    assert rep.max_symmetry_deviation > 0.2


def test_symmetry_check_accepts_mirror_pair():
    outer = rc.Circle(3.0 + 0j, 0.5, rc.CW, 32)
    mirror = rc.invert_circle(outer)
    system = rc.build_contour([rc.Circle(0j, 1.0, rc.CW, 32), outer, mirror])
    pair = lambda z: np.array([[1.0, 0.5 / (z - 3.0)], [0.0, 1.0]])
    fns = [
        lambda z: np.diag([2.0, 1.0]),  # Hermitian, positive on S^1
        pair,
        rc.inversion_conjugate(pair),
    ]
    v = rc.JumpData.from_evaluators(system, fns)
    rep = rc.check_inversion_hypotheses(v)
    assert rep.symmetric_off_circle
    assert rep.max_symmetry_deviation < 1e-12
    assert abs(rep.min_re_eig_on_circle - 1.0) < 1e-12
    assert rep.hermitian_deviation_on_circle < 1e-12


def test_evaluate_respects_contour_margin(rational_radius6):
    _, jump = rational_radius6
    sol = rc.solve(rc.RHProblem.from_jump(jump))
    with pytest.raises(rc.TooCloseToContourError):
        sol.evaluate(6.0 + 1e-9j)


def test_near_singular_error_reports_value():
    err = rc.NearSingularOperatorError(3e-12)
    assert err.smallest_singular_value == 3e-12
    assert "3e-12" in str(err) or "3.0" in str(err) or "e-12" in str(err)
