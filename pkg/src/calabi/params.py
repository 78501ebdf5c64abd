"""Coefficient maps, the cubic forcing polynomials and their closed-form roots.

Everything here is algebra on double-precision scalars (or numpy arrays where
noted).  The conical problem is parameterised by the Kahler-class parameter
``m``, the cone angle ``beta0`` at the zero divisor and the gap
``alpha = beta0 - beta_inf``; the smooth problem by ``m`` and the free
constant ``C``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError

__all__ = [
    "ProblemSpec",
    "ConicalCoeffs",
    "SmoothCoeffs",
    "PolyInfo",
    "conical_coeffs",
    "poly_p",
    "poly_p_gamma",
    "poly_info",
    "integral_P",
    "derivative_q",
    "derivative_Q",
    "smooth_coeffs",
]


@dataclass(frozen=True)
class ProblemSpec:
    """One conical boundary-value instance.

    ``alpha`` is the canonical free parameter; ``beta_inf`` is derived.
    Use :meth:`from_angles` when both cone angles are known.
    """

    m: float
    beta0: float
    alpha: float

    def __post_init__(self) -> None:
        for name in ("m", "beta0", "alpha"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if self.m <= 0.0:
            raise DomainError(f"m must be positive, got {self.m!r}")
        if self.beta0 <= 0.0:
            raise DomainError(f"beta0 must be positive, got {self.beta0!r}")
        if self.alpha >= self.beta0:
            raise DomainError(
                f"alpha must be below beta0 (beta_inf > 0), got alpha={self.alpha!r}, beta0={self.beta0!r}"
            )

    @classmethod
    def from_angles(cls, m: float, beta0: float, beta_inf: float) -> "ProblemSpec":
        if beta_inf <= 0.0:
            raise DomainError(f"beta_inf must be positive, got {beta_inf!r}")
        return cls(float(m), float(beta0), float(beta0) - float(beta_inf))

    @classmethod
    def from_gap(cls, m: float, beta0: float, alpha: float) -> "ProblemSpec":
        return cls(float(m), float(beta0), float(alpha))

    @property
    def beta_inf(self) -> float:
        return self.beta0 - self.alpha


@dataclass(frozen=True)
class ConicalCoeffs:
    """Constants of the conical ODE ``(2g + phi) phi' = B g^3/2 + C g``."""

    B: float
    C: float

    def forcing(self, gamma):
        """``p(gamma) * gamma``; the inhomogeneous term of the transformed IVP."""
        return gamma * (0.5 * self.B * gamma * gamma + self.C)

    def forcing_prime(self, gamma):
        return 1.5 * self.B * gamma * gamma + self.C

    def monomials(self) -> tuple[float, float, float]:
        """Coefficients of ``g``, ``g^3``, ``g^4`` in :meth:`forcing`."""
        return self.C, 0.5 * self.B, 0.0


@dataclass(frozen=True)
class SmoothCoeffs:
    """Constants of the smooth ODE ``(2x + psi) psi' = A x^4/3 + B x^3/2 + C x``."""

    A: float
    B: float
    C: float

    def forcing(self, x):
        return x * (self.A * x * x * x / 3.0 + 0.5 * self.B * x * x + self.C)

    def forcing_prime(self, x):
        return 4.0 * self.A * x * x * x / 3.0 + 1.5 * self.B * x * x + self.C

    def monomials(self) -> tuple[float, float, float]:
        return self.C, 0.5 * self.B, self.A / 3.0


@dataclass(frozen=True)
class PolyInfo:
    """Sign-change data of ``p``: ``gamma0`` is its root, ``gamma00`` the
    critical point of ``p(g) g`` when that lies inside ``[1, m+1]``."""

    gamma0: float
    gamma00: Optional[float] = None


def conical_coeffs(spec: ProblemSpec) -> ConicalCoeffs:
    """B and C as linear functions of the two cone angles."""
    if not isinstance(spec, ProblemSpec):
        raise DomainError("conical_coeffs expects a ProblemSpec")
    m, b0, binf = spec.m, spec.beta0, spec.beta_inf
    if binf <= 0.0:
        raise DomainError(f"beta_inf must be positive, got {binf!r}")
    denom = m * (m + 2.0)
    B = -4.0 * (b0 + binf) / denom
    C = 2.0 * (b0 * (m + 1.0) ** 2 + binf) / denom
    return ConicalCoeffs(B, C)


def poly_p(gamma, c: ConicalCoeffs):
    return 0.5 * c.B * gamma * gamma + c.C


def poly_p_gamma(gamma, c: ConicalCoeffs):
    return c.forcing(gamma)


def poly_info(c: ConicalCoeffs, m: float) -> PolyInfo:
    """Root and critical point from their closed forms (no root finding)."""
    if not (c.B < 0.0):
        raise DomainError(f"poly_info needs B < 0, got B={c.B!r}")
    if not (c.C > 0.0):
        raise DomainError(f"poly_info needs C > 0, got C={c.C!r}")
    gamma0 = math.sqrt(-2.0 * c.C / c.B)
    crit = math.sqrt(-2.0 * c.C / (3.0 * c.B))
    gamma00 = crit if 1.0 <= crit <= m + 1.0 else None
    return PolyInfo(gamma0, gamma00)


def integral_P(gamma, c: ConicalCoeffs):
    """Antiderivative of ``p(t) t`` on ``[1, gamma]``."""
    g2 = gamma * gamma
    return c.B * (g2 * g2 - 1.0) / 8.0 + c.C * (g2 - 1.0) / 2.0


def derivative_q(gamma, m: float):
    """Sensitivity ``d(p(g) g)/d alpha``; independent of alpha and beta0."""
    return 2.0 * gamma * (gamma + 1.0) * (gamma - 1.0) / (m * (m + 2.0))


def derivative_Q(gamma, m: float):
    """Antiderivative of :func:`derivative_q` on ``[1, gamma]``."""
    g2m1 = gamma * gamma - 1.0
    return g2m1 * g2m1 / (2.0 * m * (m + 2.0))


def smooth_coeffs(C: float, m: float) -> SmoothCoeffs:
    """A and B fixed by the boundary slopes +1 and -1 of the smooth profile."""
    if not m > 0.0:
        raise DomainError(f"m must be positive, got {m!r}")
    inv = 1.0 / (m + 1.0) ** 2
    A = (3.0 * C / m) * (1.0 - inv) - (6.0 / m) * (1.0 + inv)
    B = -(2.0 * C / m) * (m + 1.0 - inv) + (4.0 / m) * (m + 1.0 + inv)
    return SmoothCoeffs(A, B, float(C))
