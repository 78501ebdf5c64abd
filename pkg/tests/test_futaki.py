import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from calabi.futaki import (
    angle_weight,
    cone_angle_line,
    conjecture_probe,
    extremal_closed_form_terms,
    logbf_conical,
    logbf_extremal_closed_form,
    logbf_smooth_quadrature,
    smooth_curvature_moment,
)
from calabi.params import smooth_coeffs

import solved


@pytest.mark.parametrize("m,beta0", solved.GRID)
def test_vanishes_at_conical_solutions(m, beta0):
    binf = solved.conical(m, beta0).spec.beta_inf
    assert abs(logbf_conical(m, beta0, binf, solved.conical_profile(m, beta0)).value) < 1e-6


@pytest.mark.parametrize("m", solved.GRID_M)
def test_smooth_quadrature_matches_closed_form(m):
    rng = np.random.default_rng(20261016 + int(10 * m))
    p = solved.smooth_profile(m)
    C = solved.smooth(m).C_star
    for b0, binf in rng.uniform(0.1, 3.0, size=(5, 2)):
        q = logbf_smooth_quadrature(m, b0, binf, p).value
        cf = logbf_extremal_closed_form(m, C, b0, binf)
        assert q == pytest.approx(cf, rel=1e-6)


def test_affine_in_angles():
    m = 2.0
    p = solved.smooth_profile(m)
    pts = np.array([[0.3, 0.9], [1.4, 2.2], [2.5, 3.5]])  # collinear
    vals = [logbf_smooth_quadrature(m, a, b, p).value for a, b in pts]
    assert vals[1] - vals[0] == pytest.approx((vals[2] - vals[0]) * (1.1 / 2.2), rel=1e-12, abs=1e-12)
    # Also affine off the line: f(x + y) - f(x) - f(y) + f(0) = 0.
    f = lambda a, b: logbf_smooth_quadrature(m, a, b, p).value  # noqa: E731
    assert f(1.3, 2.1) - f(1.3, 0.0) - f(0.0, 2.1) + f(0.0, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_line_coefficients_at_m1():
    C = 4.0
    line = cone_angle_line(1.0, C)
    assert line.coef_beta_inf == pytest.approx(8.0 / 3.0, rel=1e-15)
    assert line.coef_beta0 == pytest.approx(-10.0 / 3.0, rel=1e-15)
    assert line.rhs == pytest.approx(13.0 * C / 16.0 - 27.0 / 8.0, rel=1e-15)


@given(st.floats(0.05, 20.0), st.floats(2.0, 10.0), st.floats(0.05, 5.0))
def test_line_is_zero_set_of_closed_form(m, C, b0):
    line = cone_angle_line(m, C)
    binf = line.beta_inf_on_line(b0)
    assert abs(line.residual(b0, binf)) <= 1e-12 * (1.0 + abs(line.rhs))
    # Setting the closed form to zero gives the same line up to the factor m/3.
    scale = sum(abs(t) for t in extremal_closed_form_terms(m, C, b0, binf).values())
    assert abs(logbf_extremal_closed_form(m, C, b0, binf)) <= 1e-12 * scale
    assert logbf_extremal_closed_form(m, C, b0, binf + 1.0) == pytest.approx(m / 3.0 * line.coef_beta_inf, rel=1e-9)


def test_angle_weight_is_mean_square():
    for m in solved.GRID_M:
        mean, _ = quad(lambda g: g * g, 1.0, 1.0 + m)
        assert angle_weight(m) == pytest.approx(3.0 * mean / (m * (m + 2.0)), rel=1e-14)


def test_curvature_moment_matches_quadrature():
    m, C = 1.5, 3.3
    c = smooth_coeffs(C, m)
    value, _ = quad(lambda x: (c.A * x + c.B) * x * x, 1.0, 1.0 + m)
    assert smooth_curvature_moment(m, C) == pytest.approx(value, rel=1e-13)


def test_probe_matches_oracle(frozen):
    r = conjecture_probe(1.0, 1.0, solved.conical(1.0, 1.0), solved.smooth(1.0))
    assert r == pytest.approx(frozen["line_residual_m1_b1"], abs=1e-8)


def test_probe_rejects_mismatched_solves():
    with pytest.raises(ValueError):
        conjecture_probe(2.0, 1.0, solved.conical(1.0, 1.0), solved.smooth(1.0))
    with pytest.raises(ValueError):
        conjecture_probe(1.0, 0.5, solved.conical(1.0, 1.0), solved.smooth(1.0))
