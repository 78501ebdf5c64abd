"""Chern number, volumes, average higher scalar curvatures and the mollifier limit.

All surface integrals are pre-reduced to one-dimensional integrals over the
momentum interval ``[1, m+1]``; the divisor contributions enter as exact
closed-form terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import NumericError
from .profile import MomentumProfile, curvature_from_fields
from .quadrature import DEFAULT_PANELS, gauss_legendre

__all__ = [
    "Target",
    "InvariantReport",
    "chern_interior",
    "chern_integral",
    "volumes",
    "average_curvatures",
    "lambda1_from_profile",
    "mollifier_limit",
    "invariant_report",
]

TWO_PI = 2.0 * math.pi
CHERN_TARGET = -4.0


@dataclass(frozen=True)
class Target:
    """A computed quantity next to its exact value."""

    computed: float
    target: float

    @property
    def deviation(self) -> float:
        return abs(self.computed - self.target)

    def as_dict(self) -> dict:
        return {"target": self.target, "computed": self.computed, "deviation": self.deviation}


@dataclass(frozen=True)
class InvariantReport:
    chern_integral: Target
    vol_X: Target
    vol_S0: Target
    vol_Sinf: Target
    lambda0: Target
    lambda1: Target
    relation_residual: Target

    def targets(self) -> dict:
        return {name: getattr(self, name).as_dict() for name in self.__dataclass_fields__}


def _chern_density(p: MomentumProfile):
    """``d/dg [(phi/g + 2) phi']`` written through ``g * lambda``."""

    def f(gamma):
        phi, dphi, ddphi = p.evaluate(gamma)
        return gamma * curvature_from_fields(gamma, phi, dphi, ddphi)

    return f


def chern_interior(p: MomentumProfile, panels: int = DEFAULT_PANELS) -> float:
    """Quadrature of the interior term over ``[1, m+1]``."""
    return gauss_legendre(_chern_density(p), 1.0, 1.0 + p.m, panels=panels)


def chern_integral(p: MomentumProfile, beta0: float, beta_inf: float, panels: int = DEFAULT_PANELS) -> float:
    """Interior quadrature plus the divisor corrections ``2(beta0-1) + 2(beta_inf-1)``.

    Pass ``beta0 = beta_inf = 1`` for a smooth profile; the corrections vanish.
    """
    return chern_interior(p, panels) + 2.0 * (beta0 - 1.0) + 2.0 * (beta_inf - 1.0)


def volumes(p: MomentumProfile | None, m: float, panels: int = DEFAULT_PANELS) -> dict:
    """``Vol(X)`` by quadrature of ``2 g`` (the profile cancels), divisor volumes in closed form."""
    vol_x = TWO_PI**2 * gauss_legendre(lambda g: 2.0 * g, 1.0, 1.0 + m, panels=panels)
    return {"vol_X": vol_x, "vol_S0": TWO_PI, "vol_Sinf": TWO_PI * (m + 1.0)}


def average_curvatures(m: float, beta0: float, beta_inf: float, vols: dict | None = None) -> dict:
    """Both averages of the higher scalar curvature and the residual of the
    relation tying them through the divisor corrections."""
    d = m * (m + 2.0)
    lambda0 = -8.0 / d
    lambda1 = -4.0 * (beta0 + beta_inf) / d
    if vols is None:
        vols = {"vol_X": TWO_PI**2 * d, "vol_S0": TWO_PI, "vol_Sinf": TWO_PI * (m + 1.0)}
    vx = vols["vol_X"]
    rhs = (
        lambda1
        + 4.0 * TWO_PI * (beta0 - 1.0) * vols["vol_S0"] / vx
        + (4.0 * TWO_PI * (beta_inf - 1.0) / (m + 1.0)) * vols["vol_Sinf"] / vx
    )
    return {"lambda0": lambda0, "lambda1": lambda1, "relation_residual": lambda0 - rhs}


def lambda1_from_profile(p: MomentumProfile, panels: int = DEFAULT_PANELS) -> float:
    """Average curvature on the complement of the divisors, from the profile."""
    return 2.0 * chern_interior(p, panels) / (p.m * (p.m + 2.0))


def mollifier_limit(
    g: Callable[[np.ndarray], np.ndarray],
    eps_sequence: Sequence[float],
    nodes: int = 32,
    panels: int = 128,
    log_span: float = 40.0,
) -> list[float]:
    """``int_0^inf 2 r eps^2 / (r^2 + eps^2)^2 g(r) dr`` for each ``eps``.

    With ``r = eps * exp(u)`` the kernel becomes ``2 t^2 / (1 + t^2)^2 du``,
    ``t = exp(u)``, smooth and decaying like ``exp(-2|u|)`` on both sides, so a
    fixed composite rule on ``|u| <= log_span / 2`` resolves it for any ``eps``.
    """
    out = []
    half = 0.5 * log_span
    for eps in eps_sequence:
        if not eps > 0.0:
            raise ValueError("eps must be positive")

        def integrand(u, eps=eps):
            t = np.exp(u)
            return 2.0 * t * t / (1.0 + t * t) ** 2 * g(eps * t)

        val = gauss_legendre(integrand, -half, half, nodes=nodes, panels=panels)
        if not math.isfinite(val):
            raise NumericError(f"mollifier integral diverged at eps={eps!r}")
        out.append(val)
    return out


def invariant_report(p: MomentumProfile, beta0: float, beta_inf: float, panels: int = DEFAULT_PANELS) -> InvariantReport:
    m = p.m
    d = m * (m + 2.0)
    vols = volumes(p, m, panels)
    curv = average_curvatures(m, beta0, beta_inf, vols)
    chern = chern_integral(p, beta0, beta_inf, panels)
    return InvariantReport(
        chern_integral=Target(chern, CHERN_TARGET),
        vol_X=Target(vols["vol_X"], TWO_PI**2 * d),
        vol_S0=Target(vols["vol_S0"], TWO_PI),
        vol_Sinf=Target(vols["vol_Sinf"], TWO_PI * (m + 1.0)),
        # Total Chern number over volume: 2 (2 pi)^2 * int c2 / Vol(X).
        lambda0=Target(2.0 * TWO_PI**2 * chern / vols["vol_X"], curv["lambda0"]),
        lambda1=Target(lambda1_from_profile(p, panels), -4.0 * (beta0 + beta_inf) / d),
        relation_residual=Target(curv["relation_residual"], 0.0),
    )
