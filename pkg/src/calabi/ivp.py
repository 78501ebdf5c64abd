"""Adaptive integration of ``v' = 2*sqrt(2)*sqrt(v) + F(g)``, ``v(1) = 2``.

``F`` is the cubic (conical) or quartic (smooth) forcing polynomial supplied
by a coefficient object from :mod:`calabi.params`.  The solution either
reaches ``g = m + 1`` or runs into ``v = 0`` with negative slope; the second
outcome is a legitimate result ("breakdown"), not an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Protocol

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from .errors import IntegrationError

__all__ = [
    "IntegratorConfig",
    "Breakdown",
    "Trajectory",
    "LocalMax",
    "integrate",
    "endpoint_value",
    "classify_endpoint",
    "local_max",
    "count_extrema",
]

SQRT8 = math.sqrt(8.0)

# Dormand-Prince 5(4) tableau.
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

# PI controller exponents for a 5th-order method.
_PI_ALPHA = 0.7 / 5.0
_PI_BETA = 0.4 / 5.0
_SAFETY = 0.9
_FAC_MIN, _FAC_MAX = 0.2, 10.0

# Below this v the step is capped at sqrt(v)/10 (sqrt singularity ahead).
_CAP_THRESHOLD = 1e-4


class Forcing(Protocol):
    def forcing(self, x): ...

    def monomials(self) -> tuple[float, float, float]: ...


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    breakdown_floor: float = 1e-12
    max_steps: int = 1_000_000
    dense_grid_n: int = 4097

    def __post_init__(self) -> None:
        for name in ("rel_tol", "abs_tol", "breakdown_floor", "max_steps", "dense_grid_n"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.dense_grid_n < 2:
            raise ValueError("dense_grid_n must be at least 2")

    def tightened(self, factor: float) -> "IntegratorConfig":
        """Same config with both tolerances divided by ``factor``."""
        return IntegratorConfig(
            self.rel_tol / factor,
            self.abs_tol / factor,
            self.breakdown_floor,
            self.max_steps,
            self.dense_grid_n,
        )


@dataclass(frozen=True)
class Breakdown:
    gamma_star: float
    v_prime_limit: float


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Dense solution on a uniform grid plus the accepted-step nodes.

    ``grid``/``values``/``derivs`` are the fixed sampling contract consumed by
    quadratures and reports; ``nodes`` and friends carry the raw step data
    behind the Hermite interpolant returned by :meth:`evaluate`.
    """

    grid: np.ndarray
    values: np.ndarray
    derivs: np.ndarray
    breakdown: Optional[Breakdown]
    nodes: np.ndarray
    node_values: np.ndarray
    node_derivs: np.ndarray
    m: float
    steps_accepted: int
    steps_rejected: int
    coeffs: object = field(repr=False, compare=False, default=None)
    _spline: CubicHermiteSpline = field(repr=False, compare=False, default=None)

    @property
    def end(self) -> float:
        return float(self.nodes[-1])

    @property
    def final_value(self) -> float:
        return float(self.node_values[-1])

    @property
    def is_full(self) -> bool:
        return self.breakdown is None

    def evaluate(self, gamma):
        """Hermite-interpolated ``v`` at arbitrary points inside ``[1, end]``."""
        return self._spline(gamma)

    def evaluate_slope(self, gamma):
        return self._spline(gamma, 1)


@dataclass(frozen=True)
class LocalMax:
    t_max: float
    v_max: float


@dataclass
class _March:
    nodes: list
    values: list
    derivs: list
    breakdown: Optional[Breakdown]
    accepted: int
    rejected: int


def _march(coeffs: Forcing, m: float, cfg: IntegratorConfig, keep_nodes: bool) -> _March:
    a1, a3, a4 = coeffs.monomials()
    rtol, atol = cfg.rel_tol, cfg.abs_tol
    floor = cfg.breakdown_floor
    sqrt = math.sqrt

    def rhs(g, v):
        return SQRT8 * sqrt(v if v > 0.0 else 0.0) + g * (a1 + g * g * (a3 + a4 * g))

    g_end = 1.0 + m
    g, v = 1.0, 2.0
    f = rhs(g, v)
    nodes, values, derivs = [g], [v], [f]

    # Initial step from the standard two-evaluation estimate.
    sc = atol + rtol * abs(v)
    d0, d1 = abs(v) / sc, abs(f) / sc
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    f1 = rhs(g + h0, v + h0 * f)
    d2 = abs(f1 - f) / sc / h0
    h1 = max(1e-6, h0 * 1e-3) if max(d1, d2) <= 1e-15 else (0.01 / max(d1, d2)) ** 0.2
    h = min(100.0 * h0, h1, m)

    err_prev = 1e-4
    accepted = rejected = 0
    breakdown = None
    while g < g_end:
        if accepted + rejected >= cfg.max_steps:
            raise IntegrationError(
                f"step budget {cfg.max_steps} exhausted at g={g!r} (v={v!r}, h={h!r})"
            )
        if v < _CAP_THRESHOLD:
            h = min(h, sqrt(v if v > 0.0 else 0.0) / 10.0)
        last = g + h >= g_end
        if last:
            h = g_end - g
        if h <= 1e-15 * g:
            raise IntegrationError(f"step size underflow at g={g!r} (v={v!r})")

        k1 = f
        k2 = rhs(g + _C2 * h, v + h * _A21 * k1)
        k3 = rhs(g + _C3 * h, v + h * (_A31 * k1 + _A32 * k2))
        k4 = rhs(g + _C4 * h, v + h * (_A41 * k1 + _A42 * k2 + _A43 * k3))
        k5 = rhs(g + _C5 * h, v + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4))
        g_new = g_end if last else g + h
        v_new = v + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5)
        k6 = rhs(g_new, v_new)
        v_new = v + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        k7 = rhs(g_new, v_new)
        est = h * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7)
        err = abs(est) / (atol + rtol * max(abs(v), abs(v_new)))

        if err <= 1.0:
            accepted += 1
            fac = _SAFETY * max(err, 1e-10) ** -_PI_ALPHA * err_prev**_PI_BETA
            err_prev = max(err, 1e-4)
            g_old, v_old = g, v
            g, v, f = g_new, v_new, k7
            if keep_nodes:
                nodes.append(g)
                values.append(v)
                derivs.append(f)
            forcing = g * (a1 + g * g * (a3 + a4 * g))
            if v < floor * (1.0 + g * g) and f < 0.0 and forcing < 0.0:
                # Linear inverse interpolation of v to zero over the final step.
                g_star = g_old + (g - g_old) * v_old / (v_old - v) if v_old != v else g
                g_star = min(max(g_star, g_old), g_end)
                f_star = g_star * (a1 + g_star * g_star * (a3 + a4 * g_star))
                breakdown = Breakdown(g_star, f_star)
                if keep_nodes:
                    nodes[-1], values[-1], derivs[-1] = g_star, 0.0, f_star
                    if nodes[-1] <= nodes[-2]:
                        del nodes[-1], values[-1], derivs[-1]
                        nodes[-1], values[-1], derivs[-1] = g_star, 0.0, f_star
                else:
                    nodes[0], values[0], derivs[0] = g_star, 0.0, f_star
                break
            h = h * min(_FAC_MAX, max(_FAC_MIN, fac))
        else:
            rejected += 1
            h = h * max(_FAC_MIN, _SAFETY * err**-0.2)

    if not keep_nodes and breakdown is None:
        nodes, values, derivs = [g], [v], [f]
    return _March(nodes, values, derivs, breakdown, accepted, rejected)


def endpoint_value(coeffs: Forcing, m: float, cfg: IntegratorConfig | None = None):
    """``(v(m+1), breakdown)`` without building the dense output; used by shooting."""
    run = _march(coeffs, m, cfg or IntegratorConfig(), keep_nodes=False)
    if run.breakdown is not None:
        return None, run.breakdown
    return run.values[-1], None


def integrate(coeffs: Forcing, m: float, cfg: IntegratorConfig | None = None) -> Trajectory:
    """Integrate from ``g = 1`` to ``g = m + 1`` or to breakdown, whichever is first."""
    cfg = cfg or IntegratorConfig()
    run = _march(coeffs, float(m), cfg, keep_nodes=True)
    nodes = np.asarray(run.nodes)
    node_values = np.asarray(run.values)
    node_derivs = np.asarray(run.derivs)
    spline = CubicHermiteSpline(nodes, node_values, node_derivs, extrapolate=False)

    grid = np.linspace(1.0, nodes[-1], cfg.dense_grid_n)
    grid[-1] = nodes[-1]
    values = np.maximum(spline(grid), 0.0)
    values[0], values[-1] = node_values[0], max(node_values[-1], 0.0)
    derivs = SQRT8 * np.sqrt(values) + coeffs.forcing(grid)
    return Trajectory(
        grid=grid,
        values=values,
        derivs=derivs,
        breakdown=run.breakdown,
        nodes=nodes,
        node_values=node_values,
        node_derivs=node_derivs,
        m=float(m),
        steps_accepted=run.accepted,
        steps_rejected=run.rejected,
        coeffs=coeffs,
        _spline=spline,
    )


def classify_endpoint(t: Trajectory, m: float) -> str:
    """``"full"`` when the run reached ``m + 1`` with ``v > 0``, else ``"breakdown"``."""
    if t.breakdown is not None:
        return "breakdown"
    if t.end < 1.0 + m - 1e-12 * (1.0 + m):
        return "breakdown"
    return "full" if float(np.min(t.node_values)) > 0.0 else "breakdown"


def count_extrema(t: Trajectory) -> tuple[int, int]:
    """Number of (maxima, minima) seen as slope sign changes between step nodes."""
    s = np.sign(t.node_derivs)
    s = s[s != 0]
    changes = np.diff(s)
    return int(np.sum(changes < 0)), int(np.sum(changes > 0))


def _fixed_steps(coeffs: Forcing, g0: float, v0: float, g1: float, n: int):
    """``n`` equal Dormand-Prince steps from ``(g0, v0)`` to ``g1``; returns node arrays."""
    a1, a3, a4 = coeffs.monomials()
    sqrt = math.sqrt

    def rhs(g, v):
        return SQRT8 * sqrt(v if v > 0.0 else 0.0) + g * (a1 + g * g * (a3 + a4 * g))

    h = (g1 - g0) / n
    gs, vs, fs = [g0], [v0], [rhs(g0, v0)]
    g, v, f = g0, v0, fs[0]
    for i in range(1, n + 1):
        k1 = f
        k2 = rhs(g + _C2 * h, v + h * _A21 * k1)
        k3 = rhs(g + _C3 * h, v + h * (_A31 * k1 + _A32 * k2))
        k4 = rhs(g + _C4 * h, v + h * (_A41 * k1 + _A42 * k2 + _A43 * k3))
        k5 = rhs(g + _C5 * h, v + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4))
        g_new = g1 if i == n else g0 + i * h
        k6 = rhs(g_new, v + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5))
        v = v + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        g = g_new
        f = rhs(g, v)
        gs.append(g)
        vs.append(v)
        fs.append(f)
    return np.asarray(gs), np.asarray(vs), np.asarray(fs)


def local_max(t: Trajectory, substeps: int = 64) -> Optional[LocalMax]:
    """Interior maximum of ``v``, if any.

    The step bracketing the slope sign change is re-integrated with
    ``substeps`` fixed steps so the argmax comes from a fine Hermite
    interpolant rather than the coarse adaptive one.
    """
    d = t.node_derivs
    idx = np.nonzero((d[:-1] > 0.0) & (d[1:] <= 0.0))[0]
    if idx.size == 0:
        return None
    i = int(idx[0])
    if i + 1 == len(t.nodes) - 1 and t.breakdown is not None:
        return None
    a, b = float(t.nodes[i]), float(t.nodes[i + 1])
    if t.coeffs is not None:
        gs, vs, fs = _fixed_steps(t.coeffs, a, float(t.node_values[i]), b, substeps)
        local = CubicHermiteSpline(gs, vs, fs)
    else:
        local = t._spline
    slope = local.derivative()
    if slope(b) > 0.0:
        return None
    t_max = b if slope(b) == 0.0 else brentq(lambda x: float(slope(x)), a, b, xtol=1e-15, rtol=1e-15)
    if t_max >= t.end:
        return None
    return LocalMax(float(t_max), float(local(t_max)))
