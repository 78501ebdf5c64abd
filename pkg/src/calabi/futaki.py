"""Top log Bando-Futaki invariant along the Euler field, and the cone-angle line.

The holomorphy potential is the momentum variable itself, so every
evaluation reduces to elementary terms plus ``int_1^{m+1} (phi/g)^2 dg``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .params import smooth_coeffs
from .profile import MomentumProfile
from .quadrature import DEFAULT_PANELS, gauss_legendre
from .shooting import SmoothSolveReport, SolveReport

__all__ = [
    "FutakiEvaluation",
    "ConeAngleLine",
    "angle_weight",
    "logbf_conical",
    "logbf_smooth_quadrature",
    "logbf_extremal_closed_form",
    "extremal_closed_form_terms",
    "smooth_curvature_moment",
    "cone_angle_line",
    "conjecture_probe",
]


@dataclass(frozen=True)
class FutakiEvaluation:
    value: float
    i_phi: float
    closed_form_terms: dict


@dataclass(frozen=True)
class ConeAngleLine:
    """``coef_beta_inf * beta_inf + coef_beta0 * beta0 = rhs``."""

    m: float
    C_star: float
    coef_beta_inf: float
    coef_beta0: float
    rhs: float

    def beta_inf_on_line(self, beta0: float) -> float:
        return (self.rhs - self.coef_beta0 * beta0) / self.coef_beta_inf

    def residual(self, beta0: float, beta_inf: float) -> float:
        return self.coef_beta_inf * beta_inf + self.coef_beta0 * beta0 - self.rhs


def angle_weight(m: float) -> float:
    """``(m^2 + 3m + 3)/(m + 2)``, i.e. ``int_1^{m+1} g^2 dg`` over ``m(m+2)/3``."""
    return (m * m + 3.0 * m + 3.0) / (m + 2.0)


def _profile_square_integral(p: MomentumProfile, panels: int) -> float:
    return gauss_legendre(lambda g: (p.phi_at(g) / g) ** 2, 1.0, 1.0 + p.m, panels=panels)


def _quadrature_form(m, beta0, beta_inf, i_phi) -> FutakiEvaluation:
    terms = {
        "boundary": 2.0 * (beta0 + (m + 1.0) * beta_inf),
        "profile": 0.5 * i_phi,
        "angles": -(4.0 / 3.0) * angle_weight(m) * (beta0 + beta_inf),
    }
    return FutakiEvaluation(value=sum(terms.values()), i_phi=i_phi, closed_form_terms=terms)


def logbf_conical(m: float, beta0: float, beta_inf: float, p: MomentumProfile, panels: int = DEFAULT_PANELS) -> FutakiEvaluation:
    """Invariant evaluated on a conical profile; vanishes on a conical solution."""
    return _quadrature_form(m, beta0, beta_inf, _profile_square_integral(p, panels))


def logbf_smooth_quadrature(m: float, beta0: float, beta_inf: float, p: MomentumProfile, panels: int = DEFAULT_PANELS) -> FutakiEvaluation:
    """Same three-term evaluation on the smooth profile ``psi``.

    The cone angles enter only through the elementary terms because the
    smooth metric carries no cone singularity of its own.
    """
    return _quadrature_form(m, beta0, beta_inf, _profile_square_integral(p, panels))


def extremal_closed_form_terms(m: float, C_star: float, beta0: float, beta_inf: float) -> dict:
    """Four summands of the closed form at the smooth higher-extremal metric."""
    m1sq = (m + 1.0) ** 2
    return {
        "C_term": -(m**3) * (m * m + 6.0 * m + 6.0) / (12.0 * m1sq) * C_star,
        "constant": m * m * (m + 2.0) ** 3 / (6.0 * m1sq),
        "beta0_term": -2.0 * m * (2.0 * m + 3.0) / (3.0 * (m + 2.0)) * beta0,
        "beta_inf_term": 2.0 * m * (m + 3.0) / (3.0 * (m + 2.0)) * beta_inf,
    }


def logbf_extremal_closed_form(m: float, C_star: float, beta0: float, beta_inf: float) -> float:
    return sum(extremal_closed_form_terms(m, C_star, beta0, beta_inf).values())


def smooth_curvature_moment(m: float, C_star: float) -> float:
    """``int_1^{m+1} (A x^3 + B x^2) dx`` for the affine curvature ``A x + B``."""
    c = smooth_coeffs(C_star, m)
    a, b = 1.0, 1.0 + m
    return c.A * (b**4 - a**4) / 4.0 + c.B * (b**3 - a**3) / 3.0


def cone_angle_line(m: float, C_star: float) -> ConeAngleLine:
    m1sq = (m + 1.0) ** 2
    return ConeAngleLine(
        m=m,
        C_star=C_star,
        coef_beta_inf=2.0 * (m + 3.0) / (m + 2.0),
        coef_beta0=-2.0 * (2.0 * m + 3.0) / (m + 2.0),
        rhs=m * m * (m * m + 6.0 * m + 6.0) / (4.0 * m1sq) * C_star - m * (m + 2.0) ** 3 / (2.0 * m1sq),
    )


def conjecture_probe(m: float, beta0: float, conical: SolveReport, smooth: SmoothSolveReport) -> float:
    """Line residual at ``(beta0, beta_inf from shooting)``; reported, never judged."""
    if abs(conical.spec.m - m) > 0.0 or abs(smooth.m - m) > 0.0:
        raise ValueError("both solves must be at the requested m")
    if conical.spec.beta0 != beta0:
        raise ValueError("conical solve is at a different beta0")
    line = cone_angle_line(m, smooth.C_star)
    return line.residual(beta0, conical.spec.beta_inf)
