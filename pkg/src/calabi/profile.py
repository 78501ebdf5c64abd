"""Momentum profile recovered from a trajectory, its curvature, and the potential.

The profile is ``phi = sqrt(2 v) - 2 g``.  Its first two derivatives are taken
from the ODE ``(2g + phi) phi' = F(g)`` and its ``g``-derivative, never from
finite differences of integrator output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import ProfileError, ReconstructionError
from .ivp import Trajectory
from .params import ConicalCoeffs, SmoothCoeffs
from .quadrature import richardson_limit

__all__ = [
    "MomentumProfile",
    "PotentialReconstruction",
    "profile_fields",
    "profile_from_trajectory",
    "higher_scalar_curvature",
    "curvature_from_fields",
    "legendre_reconstruct",
    "potential_coordinate",
    "asymptotic_cone_check",
    "legendre_slopes",
]

# Geometric tau sequence used for the endpoint limits.
LIMIT_TAU0 = 1e-3
LIMIT_TERMS = 8
TAU_MIN_FACTOR = 1e-8
_SEGMENT_NODES = 16


def profile_fields(gamma, v, coeffs):
    """``(phi, phi', phi'')`` at points where ``v`` is known."""
    gamma = np.asarray(gamma, dtype=float)
    v = np.asarray(v, dtype=float)
    root = np.sqrt(2.0 * np.maximum(v, 0.0))  # equals 2g + phi
    # Cancellation-free form of sqrt(2v) - 2g.
    phi = (2.0 * v - 4.0 * gamma * gamma) / (root + 2.0 * gamma)
    dphi = coeffs.forcing(gamma) / root
    ddphi = (coeffs.forcing_prime(gamma) - (2.0 + dphi) * dphi) / root
    return phi, dphi, ddphi


@dataclass(frozen=True, eq=False)
class MomentumProfile:
    """``phi`` and its derivatives on ``grid`` (``x``/``psi`` for the smooth problem).

    ``evaluate`` gives the same three fields at arbitrary points: through the
    trajectory's interpolant when one is attached, otherwise by Hermite
    interpolation of the stored ``phi``/``dphi`` columns.
    """

    grid: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    ddphi: np.ndarray
    coeffs: object
    m: float
    _v_source: Optional[Callable] = field(default=None, repr=False)
    _fallback: Optional[CubicHermiteSpline] = field(default=None, repr=False)

    @property
    def is_conical(self) -> bool:
        return isinstance(self.coeffs, ConicalCoeffs)

    def evaluate(self, gamma):
        gamma = np.asarray(gamma, dtype=float)
        if self._v_source is not None:
            return profile_fields(gamma, self._v_source(gamma), self.coeffs)
        spline = self._fallback
        if spline is None:
            spline = CubicHermiteSpline(self.grid, self.phi, self.dphi)
            object.__setattr__(self, "_fallback", spline)
        phi = spline(gamma)
        root = 2.0 * gamma + phi
        dphi = self.coeffs.forcing(gamma) / root
        ddphi = (self.coeffs.forcing_prime(gamma) - (2.0 + dphi) * dphi) / root
        return phi, dphi, ddphi

    def phi_at(self, gamma):
        return self.evaluate(gamma)[0]


@dataclass(frozen=True, eq=False)
class PotentialReconstruction:
    """``s(tau)`` anchored at ``s(m/2) = 0`` and ``f''(s) = phi(tau)``."""

    tau_grid: np.ndarray
    s_values: np.ndarray
    fpp_values: np.ndarray


def profile_from_trajectory(t: Trajectory, coeffs) -> MomentumProfile:
    if not t.is_full:
        raise ProfileError(
            f"trajectory breaks down at g*={t.breakdown.gamma_star!r}; no profile exists"
        )
    if not isinstance(coeffs, (ConicalCoeffs, SmoothCoeffs)):
        raise ProfileError("coefficients must be ConicalCoeffs or SmoothCoeffs")
    phi, dphi, ddphi = profile_fields(t.grid, t.values, coeffs)
    return MomentumProfile(
        grid=t.grid.copy(),
        phi=phi,
        dphi=dphi,
        ddphi=ddphi,
        coeffs=coeffs,
        m=t.m,
        _v_source=t.evaluate,
    )


def curvature_from_fields(gamma, phi, dphi, ddphi):
    """``(g (phi + 2g) phi'' + phi' (phi' g - phi)) / g^3``."""
    return (gamma * (phi + 2.0 * gamma) * ddphi + dphi * (dphi * gamma - phi)) / gamma**3


def higher_scalar_curvature(p: MomentumProfile) -> np.ndarray:
    return curvature_from_fields(p.grid, p.phi, p.dphi, p.ddphi)


def _segment_integrals(p: MomentumProfile, log_a, log_b, side: str) -> np.ndarray:
    """``int dy / phi(y)`` over segments given in log variables.

    ``side == "left"``: ``y = exp(u)``; ``side == "right"``: ``y = m - exp(u)``.
    Both substitutions turn the endpoint ``1/y`` singularity into a bounded
    integrand ``y / phi``.
    """
    x, w = np.polynomial.legendre.leggauss(_SEGMENT_NODES)
    log_a = np.asarray(log_a, dtype=float)
    log_b = np.asarray(log_b, dtype=float)
    half = 0.5 * (log_b - log_a)
    mid = 0.5 * (log_b + log_a)
    u = mid[:, None] + half[:, None] * x[None, :]
    e = np.exp(u)
    tau = e if side == "left" else p.m - e
    phi = p.phi_at(1.0 + tau)
    if np.any(~np.isfinite(phi)) or np.any(phi <= 0.0):
        bad = tau[(phi <= 0.0) | ~np.isfinite(phi)]
        raise ReconstructionError(f"profile not positive at tau={bad.ravel()[:3]!r}")
    return (half[:, None] * w[None, :] * (e / phi)).sum(axis=1)


def potential_coordinate(p: MomentumProfile, tau) -> np.ndarray:
    """``s(tau) = int_{m/2}^{tau} dy / phi(y)`` for points in ``(0, m)``."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    m = p.m
    if np.any(tau <= 0.0) or np.any(tau >= m):
        raise ReconstructionError("tau must lie strictly inside (0, m)")
    out = np.empty_like(tau)
    half = 0.5 * m
    left = tau <= half
    if np.any(left):
        # Subdivide each [tau, m/2] into unit-width pieces in log(tau).
        out[left] = -_log_integral(p, tau[left], half, "left")
    right = ~left
    if np.any(right):
        out[right] = _log_integral(p, m - tau[right], half, "right")
    return out


def _log_integral(p, z, z_anchor, side) -> np.ndarray:
    """``int`` from distance ``z`` to ``z_anchor`` (both measured from the endpoint)."""
    res = np.empty_like(z)
    for i, zi in enumerate(z):
        la, lb = np.log(zi), np.log(z_anchor)
        n = max(1, int(np.ceil(abs(lb - la) / 0.5)))
        edges = np.linspace(la, lb, n + 1)
        res[i] = _segment_integrals(p, edges[:-1], edges[1:], side).sum()
    return res


def legendre_reconstruct(p: MomentumProfile, tau_min_factor: float = TAU_MIN_FACTOR, n_tail: int = 48) -> PotentialReconstruction:
    """Recover ``s = F'(tau)`` from ``ds = dtau / phi`` on ``[tau_min, m - tau_min]``.

    The grid is geometric near both endpoints and follows the profile grid in
    the middle.  Cumulative sums run outward from the anchor ``tau = m/2``.
    """
    m = p.m
    tau_min = tau_min_factor * m
    half = 0.5 * m
    interior = p.grid[1:-1] - 1.0
    tail = np.geomspace(tau_min, 0.25 * m, n_tail)
    tau = np.unique(np.concatenate([tail, interior, m - tail, [half]]))
    tau = tau[(tau >= tau_min) & (tau <= m - tau_min)]

    s = np.empty_like(tau)
    k = int(np.searchsorted(tau, half))
    s[k] = 0.0
    # Left of the anchor: segments in log(tau).
    left = tau[: k + 1]
    seg = _segment_integrals(p, np.log(left[:-1]), np.log(left[1:]), "left")
    s[:k] = -np.cumsum(seg[::-1])[::-1]
    # Right of the anchor: segments in log(m - tau), traversed toward the endpoint.
    right = m - tau[k:]
    seg = _segment_integrals(p, np.log(right[1:]), np.log(right[:-1]), "right")
    s[k + 1 :] = np.cumsum(seg)

    if np.any(np.diff(s) <= 0.0):
        raise ReconstructionError("reconstructed s is not strictly increasing")
    fpp = p.phi_at(1.0 + tau)
    return PotentialReconstruction(tau_grid=tau, s_values=s, fpp_values=fpp)


def asymptotic_cone_check(p: MomentumProfile, tau0: float = LIMIT_TAU0, terms: int = LIMIT_TERMS) -> dict:
    """Extrapolated ``lim phi(tau)/tau`` (at 0) and ``lim phi(tau)/(m - tau)`` (at m)."""
    z = tau0 * 0.5 ** np.arange(terms)
    left = p.phi_at(1.0 + z) / z
    right = p.phi_at(1.0 + p.m - z) / z
    c_zero, _ = richardson_limit(left, 0.5, 1)
    c_inf, _ = richardson_limit(right, 0.5, 1)
    return {"c2_zero": c_zero, "c2_inf": c_inf}


def legendre_slopes(p: MomentumProfile, tau0: float = LIMIT_TAU0, terms: int = LIMIT_TERMS) -> dict:
    """Extrapolated ``ds/d(ln tau)`` at ``tau -> 0`` and ``ds/d(ln(m - tau))`` at ``tau -> m``.

    Slopes come from differences of the reconstructed ``s`` over successive
    halvings, so they test the reconstruction itself.
    """
    z = tau0 * 0.5 ** np.arange(terms + 1)
    s_left = potential_coordinate(p, z)
    s_right = potential_coordinate(p, p.m - z)
    ln2 = np.log(2.0)
    d_left = (s_left[:-1] - s_left[1:]) / ln2
    d_right = (s_right[:-1] - s_right[1:]) / ln2
    zero, _ = richardson_limit(d_left, 0.5, 1)
    inf, _ = richardson_limit(d_right, 0.5, 1)
    return {"slope_zero": zero, "slope_inf": inf}
