"""One-parameter shooting for the conical and the smooth boundary-value problems.

Both problems integrate ``v' = 2 sqrt(2) sqrt(v) + F(g)`` from ``v(1) = 2``
and ask for ``v(m+1) = 2 (m+1)^2``.  The conical problem shoots over the
cone-angle gap ``alpha``; the residual is increasing in ``alpha`` with slope
at least ``m(m+2)/2``.  The smooth problem shoots over ``C``; its residual is
observed to be decreasing and that is checked on every probe, not assumed.

A run that breaks down (``v -> 0`` before ``m + 1``) counts as a residual of
minus infinity, i.e. below target.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import DomainError, SolverError
from .ivp import IntegratorConfig, Trajectory, endpoint_value, integrate
from .params import (
    ConicalCoeffs,
    ProblemSpec,
    SmoothCoeffs,
    conical_coeffs,
    derivative_Q,
    smooth_coeffs,
)

__all__ = [
    "Probe",
    "SolveReport",
    "SmoothSolveReport",
    "solve_conical",
    "solve_smooth",
    "locate_breakdown_boundary",
    "shooting_residual",
    "shooting_config",
]

log = logging.getLogger(__name__)

MIN_PARAMETER = 1e-6
MAX_EXPANSIONS = 64
MAX_ITERATIONS = 200


@dataclass(frozen=True)
class Probe:
    """One shooting evaluation; ``residual`` is ``None`` when the run broke down."""

    parameter: float
    residual: Optional[float]

    @property
    def broke_down(self) -> bool:
        return self.residual is None


@dataclass(frozen=True, eq=False)
class SolveReport:
    spec: ProblemSpec
    coeffs: ConicalCoeffs
    residual: float
    iterations: int
    bracket_history: tuple
    trajectory: Trajectory = field(repr=False)
    tol: float = 1e-10


@dataclass(frozen=True, eq=False)
class SmoothSolveReport:
    m: float
    C_star: float
    coeffs: SmoothCoeffs
    residual: float
    iterations: int
    bracket_history: tuple
    trajectory: Trajectory = field(repr=False)
    tol: float = 1e-10


def shooting_config(tol: float, base: IntegratorConfig | None = None) -> IntegratorConfig:
    """Integrator settings used for a shooting tolerance: both tolerances at ``tol/100``."""
    base = base or IntegratorConfig()
    return IntegratorConfig(
        rel_tol=tol / 100.0,
        abs_tol=tol / 100.0,
        breakdown_floor=base.breakdown_floor,
        max_steps=base.max_steps,
        dense_grid_n=base.dense_grid_n,
    )


def shooting_residual(coeffs, m: float, cfg: IntegratorConfig) -> Optional[float]:
    v_end, breakdown = endpoint_value(coeffs, m, cfg)
    if breakdown is not None:
        return None
    return v_end - 2.0 * (m + 1.0) ** 2


def _check_inputs(m: float, tol: float, beta0: float | None = None) -> None:
    if not (math.isfinite(m) and m >= MIN_PARAMETER):
        raise DomainError(f"m must be at least {MIN_PARAMETER}, got {m!r}")
    if beta0 is not None and not (math.isfinite(beta0) and beta0 >= MIN_PARAMETER):
        raise DomainError(f"beta0 must be at least {MIN_PARAMETER}, got {beta0!r}")
    if not (tol > 0.0 and math.isfinite(tol)):
        raise DomainError(f"tol must be positive, got {tol!r}")


class _Shooter:
    """Residual evaluator that records every probe and guards monotonicity.

    ``direction`` is +1 for a residual increasing in the parameter and -1 for a
    decreasing one.  ``min_slope`` is a proven lower bound on
    ``|d residual / d parameter|``; violations beyond ``slack`` abort.
    """

    def __init__(
        self,
        residual: Callable[[float], Optional[float]],
        direction: int,
        slack: float,
        min_slope: float = 0.0,
    ):
        self._residual = residual
        self.direction = direction
        self.slack = slack
        self.min_slope = min_slope
        self.history: list[Probe] = []

    def __call__(self, x: float) -> Optional[float]:
        r = self._residual(x)
        probe = Probe(float(x), None if r is None else float(r))
        self.history.append(probe)
        log.debug("probe parameter=%.17g residual=%s", x, r)
        self._guard()
        return r

    @staticmethod
    def oriented(r: Optional[float]) -> float:
        """Residual with breakdown mapped to -inf (below target)."""
        return -math.inf if r is None else r

    def _guard(self) -> None:
        pts = sorted(self.history, key=lambda p: self.direction * p.parameter)
        for lo, hi in zip(pts, pts[1:]):
            if lo.parameter == hi.parameter:
                continue
            if hi.residual is None:
                if lo.residual is not None:
                    raise SolverError(
                        "residual is not monotone: breakdown above a full run", self.history
                    )
                continue
            if lo.residual is None:
                continue
            gain = self.oriented(hi.residual) - self.oriented(lo.residual)
            need = self.min_slope * abs(hi.parameter - lo.parameter)
            if gain < need - self.slack:
                raise SolverError(
                    f"residual monotonicity violated between {lo.parameter!r} and {hi.parameter!r}",
                    self.history,
                )


def _find_root(
    shoot: _Shooter,
    lo: float,
    r_lo: Optional[float],
    hi: float,
    r_hi: Optional[float],
    tol_res: float,
) -> tuple[float, float, int]:
    """Illinois regula falsi with bisection fallback on a sign bracket.

    The residual is negative (or a breakdown) at ``lo`` and positive at
    ``hi``; the two may come in either numeric order.
    """
    f_lo, f_hi = shoot.oriented(r_lo), shoot.oriented(r_hi)
    side = 0
    best = (hi, r_hi) if abs(f_hi) < abs(f_lo) else (lo, r_lo)
    for it in range(1, MAX_ITERATIONS + 1):
        width = abs(hi - lo)
        if width <= 4.0 * 2.2e-16 * max(1.0, abs(lo), abs(hi)):
            break
        x = None
        if math.isfinite(f_lo) and math.isfinite(f_hi):
            x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
            margin = 1e-3 * width
            a, b = min(lo, hi), max(lo, hi)
            if not a < x < b:
                x = None
            elif x - a < margin or b - x < margin:
                # Secant hugging an endpoint: double its step so the next
                # probe lands past the root and closes the bracket.
                near = a if x - a < b - x else b
                x = near + 2.0 * (x - near)
        if x is None:
            x = 0.5 * (lo + hi)
        r = shoot(x)
        f = shoot.oriented(r)
        if r is not None and (best[1] is None or abs(r) < abs(best[1])):
            best = (x, r)
        if r is not None and abs(r) <= tol_res:
            return x, r, it
        if f < 0.0:
            lo, f_lo = x, f
            if side == -1 and math.isfinite(f_hi):
                f_hi *= 0.5
            side = -1
        else:
            hi, f_hi = x, f
            if side == 1 and math.isfinite(f_lo):
                f_lo *= 0.5
            side = 1
    if best[1] is not None and abs(best[1]) <= tol_res:
        return best[0], best[1], MAX_ITERATIONS
    raise SolverError(
        f"no convergence to residual {tol_res:g}; best {best[1]!r} at {best[0]!r}", shoot.history
    )


def solve_conical(
    m: float,
    beta0: float,
    tol: float = 1e-10,
    cfg: IntegratorConfig | None = None,
    guess: float | None = None,
) -> SolveReport:
    """Find the gap ``alpha*`` (hence ``beta_inf``) solving the conical problem.

    ``tol`` is relative: the boundary residual must satisfy
    ``|v(m+1) - 2(m+1)^2| <= tol * (m+1)^2``.  ``guess`` is tried first and
    accepted outright when already within tolerance.
    """
    m, beta0 = float(m), float(beta0)
    _check_inputs(m, tol, beta0)
    icfg = shooting_config(tol, cfg)
    target_scale = (m + 1.0) ** 2
    tol_res = tol * target_scale

    def residual(alpha: float) -> Optional[float]:
        return shooting_residual(conical_coeffs(ProblemSpec(m, beta0, alpha)), m, icfg)

    slack = 100.0 * icfg.rel_tol * 2.0 * target_scale + 1e-13 * target_scale
    shoot = _Shooter(residual, +1, slack, min_slope=float(derivative_Q(m + 1.0, m)))

    if guess is not None and guess < beta0:
        r = shoot(float(guess))
        if r is not None and abs(r) <= tol_res:
            return _conical_report(m, beta0, float(guess), shoot, 1, icfg, tol)

    hi = beta0 * (1.0 - 1e-6)
    r_hi = shoot(hi)
    if r_hi is None or r_hi <= 0.0:
        raise SolverError(
            f"residual at alpha={hi!r} is not above target ({r_hi!r})", shoot.history
        )

    lo, r_lo = None, None
    step = 0.25
    alpha = 0.0
    for _ in range(MAX_EXPANSIONS):
        r = shoot(alpha)
        if r is not None and abs(r) <= tol_res:
            return _conical_report(m, beta0, alpha, shoot, len(shoot.history), icfg, tol)
        if r is None or r < 0.0:
            lo, r_lo = alpha, r
            break
        hi, r_hi = alpha, r
        alpha = -step if alpha == 0.0 else 2.0 * alpha
    if lo is None:
        raise SolverError("no lower bracket for alpha after marching down", shoot.history)

    n_bracket = len(shoot.history)
    alpha_star, _, iters = _find_root(shoot, lo, r_lo, hi, r_hi, tol_res)
    log.info("conical solve m=%g beta0=%g alpha*=%.17g after %d probes", m, beta0, alpha_star, n_bracket + iters)
    return _conical_report(m, beta0, alpha_star, shoot, iters, icfg, tol)


def _conical_report(m, beta0, alpha, shoot, iterations, icfg, tol) -> SolveReport:
    spec = ProblemSpec(m, beta0, alpha)
    coeffs = conical_coeffs(spec)
    traj = integrate(coeffs, m, icfg)
    if not traj.is_full:
        raise SolverError("converged parameter breaks down on re-integration", shoot.history)
    residual = traj.final_value - 2.0 * (m + 1.0) ** 2
    return SolveReport(
        spec=spec,
        coeffs=coeffs,
        residual=residual,
        iterations=iterations,
        bracket_history=tuple(shoot.history),
        trajectory=traj,
        tol=tol,
    )


def solve_smooth(
    m: float,
    tol: float = 1e-10,
    cfg: IntegratorConfig | None = None,
    guess: float | None = None,
) -> SmoothSolveReport:
    """Find ``C(m)`` for the smooth higher-extremal problem (boundary slopes +1, -1)."""
    m = float(m)
    _check_inputs(m, tol)
    icfg = shooting_config(tol, cfg)
    target_scale = (m + 1.0) ** 2
    tol_res = tol * target_scale

    def residual(C: float) -> Optional[float]:
        return shooting_residual(smooth_coeffs(C, m), m, icfg)

    slack = 100.0 * icfg.rel_tol * 2.0 * target_scale + 1e-13 * target_scale
    shoot = _Shooter(residual, -1, slack)

    if guess is not None:
        r = shoot(float(guess))
        if r is not None and abs(r) <= tol_res:
            return _smooth_report(m, float(guess), shoot, 1, icfg, tol)

    anchor = 2.0
    r_anchor = shoot(anchor)
    step = 0.25
    if r_anchor is not None and r_anchor > 0.0:
        above, r_above = anchor, r_anchor
        below, r_below = None, None
        for k in range(MAX_EXPANSIONS):
            C = anchor + step * 2.0**k
            r = shoot(C)
            if r is None or r <= 0.0:
                below, r_below = C, r
                break
            above, r_above = C, r
    else:
        below, r_below = anchor, r_anchor
        above, r_above = None, None
        for k in range(MAX_EXPANSIONS):
            C = anchor - step * 2.0**k
            r = shoot(C)
            if r is not None and r > 0.0:
                above, r_above = C, r
                break
            below, r_below = C, r
    if above is None or below is None:
        raise SolverError("no sign bracket for C", shoot.history)
    if r_below is not None and abs(r_below) <= tol_res:
        return _smooth_report(m, below, shoot, len(shoot.history), icfg, tol)

    C_star, _, iters = _find_root(shoot, below, r_below, above, r_above, tol_res)
    log.info("smooth solve m=%g C*=%.17g", m, C_star)
    return _smooth_report(m, C_star, shoot, iters, icfg, tol)


def _smooth_report(m, C, shoot, iterations, icfg, tol) -> SmoothSolveReport:
    coeffs = smooth_coeffs(C, m)
    traj = integrate(coeffs, m, icfg)
    if not traj.is_full:
        raise SolverError("converged C breaks down on re-integration", shoot.history)
    return SmoothSolveReport(
        m=m,
        C_star=float(C),
        coeffs=coeffs,
        residual=traj.final_value - 2.0 * (m + 1.0) ** 2,
        iterations=iterations,
        bracket_history=tuple(shoot.history),
        trajectory=traj,
        tol=tol,
    )


def locate_breakdown_boundary(
    m: float,
    beta0: float,
    tol: float = 1e-10,
    cfg: IntegratorConfig | None = None,
) -> float:
    """Lower end ``M`` of the interval of gaps whose runs reach ``m + 1``.

    Bisection on the full/breakdown classification, absolute width ``tol``.
    The returned midpoint has a full run at ``M + tol`` and a breakdown at
    ``M - tol``.
    """
    m, beta0 = float(m), float(beta0)
    _check_inputs(m, tol, beta0)
    icfg = shooting_config(max(tol, 1e-10), cfg)

    def full(alpha: float) -> bool:
        _, breakdown = endpoint_value(conical_coeffs(ProblemSpec(m, beta0, alpha)), m, icfg)
        return breakdown is None

    if not full(0.0):
        raise SolverError("alpha = 0 does not reach m + 1")
    good, bad = 0.0, None
    alpha = -0.25
    for _ in range(MAX_EXPANSIONS):
        if not full(alpha):
            bad = alpha
            break
        good = alpha
        alpha *= 2.0
    if bad is None:
        raise SolverError("no breakdown found while marching alpha down")
    while good - bad > tol:
        mid = 0.5 * (good + bad)
        if mid == good or mid == bad:
            break
        if full(mid):
            good = mid
        else:
            bad = mid
    return 0.5 * (good + bad)
