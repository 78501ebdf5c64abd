import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from calabi.errors import DomainError, SolverError
from calabi.ivp import IntegratorConfig, endpoint_value
from calabi.params import ProblemSpec, conical_coeffs
from calabi.shooting import locate_breakdown_boundary, solve_conical, solve_smooth

import solved


def endpoint(m, beta0, alpha, cfg=IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)):
    v, _ = endpoint_value(conical_coeffs(ProblemSpec(m, beta0, alpha)), m, cfg)
    return v


def test_gap_matches_oracle(frozen):
    rep = solved.conical(1.0, 1.0)
    assert rep.spec.alpha == pytest.approx(frozen["alpha_star_m1_b1"], abs=1e-9)


def test_smooth_constant_matches_oracle(frozen):
    assert solved.smooth(1.0).C_star == pytest.approx(frozen["C_star_m1"], abs=1e-9)


def test_breakdown_boundary_matches_oracle(frozen):
    # The oracle classifies by v <= 0, the integrator by a relative floor; they
    # agree to well under the bisection width used here.
    M = locate_breakdown_boundary(1.0, 1.0, tol=1e-9)
    assert M == pytest.approx(frozen["breakdown_boundary_m1_b1"], abs=1e-7)


@pytest.mark.parametrize("m,beta0", solved.GRID)
def test_conical_solution_properties(m, beta0):
    rep = solved.conical(m, beta0)
    assert abs(rep.residual) < 1e-10 * (m + 1.0) ** 2
    assert rep.spec.alpha < 0.0
    assert rep.spec.beta_inf > beta0
    assert rep.trajectory.is_full


@pytest.mark.parametrize("m", solved.GRID_M)
def test_smooth_solution_sign_pattern(m):
    rep = solved.smooth(m)
    assert rep.C_star > 2.0
    assert rep.coeffs.A > 0.0 > rep.coeffs.B
    assert abs(rep.residual) < 1e-10 * (m + 1.0) ** 2


@pytest.mark.parametrize("m,beta0", [(1.0, 1.0), (5.0, 2.0), (0.5, 0.5)])
def test_idempotent_from_own_answer(m, beta0):
    first = solved.conical(m, beta0)
    again = solve_conical(m, beta0, guess=first.spec.alpha)
    assert again.iterations <= 2
    assert again.spec.alpha == pytest.approx(first.spec.alpha, abs=1e-12)


def test_smooth_idempotent_from_own_answer():
    first = solved.smooth(2.0)
    assert solve_smooth(2.0, guess=first.C_star).iterations <= 2


def test_bit_identical_repeat():
    a = solve_conical(2.0, 0.5)
    b = solve_conical(2.0, 0.5)
    assert a.spec == b.spec
    assert a.residual == b.residual
    assert a.bracket_history == b.bracket_history
    assert np.array_equal(a.trajectory.values, b.trajectory.values)


@settings(max_examples=10, deadline=None)
@given(st.floats(-4.4, 0.99), st.floats(-4.4, 0.99))
def test_shooting_map_slope_bound(a1, a2):
    lo, hi = sorted((a1, a2))
    v_lo, v_hi = endpoint(1.0, 1.0, lo), endpoint(1.0, 1.0, hi)
    assert v_lo is not None and v_hi is not None
    assert v_hi - v_lo >= 1.5 * (hi - lo) - 1e-8


def test_bracket_history_straddles_the_root():
    rep = solved.conical(2.0, 1.0)
    rs = [p.residual for p in rep.bracket_history]
    assert any(r is not None and r > 0 for r in rs)
    assert any(r is None or r < 0 for r in rs)


def test_breakdown_boundary_ordering():
    m, beta0 = 1.0, 1.0
    M = locate_breakdown_boundary(m, beta0, tol=1e-8)
    assert M < solved.conical(m, beta0).spec.alpha < 0.0
    assert endpoint(m, beta0, M + 1e-6) is not None
    assert endpoint(m, beta0, M - 1e-6) is None


@pytest.mark.parametrize("bad", [dict(m=1e-7, beta0=1.0), dict(m=1.0, beta0=1e-7), dict(m=-1.0, beta0=1.0)])
def test_degenerate_inputs_rejected(bad):
    with pytest.raises(DomainError):
        solve_conical(**bad)


def test_degenerate_smooth_input_rejected():
    with pytest.raises(DomainError):
        solve_smooth(1e-9)


def test_nonconvergence_carries_history():
    with pytest.raises(SolverError) as info:
        solve_conical(1.0, 1.0, cfg=IntegratorConfig(max_steps=50_000, breakdown_floor=1e-12), tol=1e-17)
    assert info.value.history
