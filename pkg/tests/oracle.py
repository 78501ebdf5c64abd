"""Independent reference route for the frozen values in ``frozen_values.json``.

Fixed-step classical RK4 on ``v' = 2 sqrt(2) sqrt(v) + F(g)`` with Richardson
extrapolation over the step pair (h, 2h), and plain bisection for roots.
Shares no code with the package: the forcing polynomials are re-typed here.

Run ``python tests/oracle.py`` to regenerate the JSON (several minutes).
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import numpy as np
from scipy.special import exp1

HERE = Path(__file__).resolve().parent
FROZEN = HERE / "frozen_values.json"
SQRT8 = math.sqrt(8.0)


def conical_forcing(m, beta0, alpha):
    binf = beta0 - alpha
    d = m * (m + 2.0)
    B = -4.0 * (beta0 + binf) / d
    C = 2.0 * (beta0 * (m + 1.0) ** 2 + binf) / d
    return lambda g: B * g**3 / 2.0 + C * g


def smooth_forcing(m, C):
    k = 1.0 / (m + 1.0) ** 2
    A = (3.0 * C / m) * (1.0 - k) - (6.0 / m) * (1.0 + k)
    B = -(2.0 * C / m) * (m + 1.0 - k) + (4.0 / m) * (m + 1.0 + k)
    return lambda x: A * x**4 / 3.0 + B * x**3 / 2.0 + C * x


def rk4_end(forcing, m, log2_steps):
    """Endpoint value at ``g = m+1`` or ``None`` once ``v`` drops to zero."""
    n = 2**log2_steps
    h = m / n
    v = 2.0
    sqrt = math.sqrt
    for i in range(n):
        g = 1.0 + i * h
        k1 = SQRT8 * sqrt(v) + forcing(g)
        w = v + 0.5 * h * k1
        if w <= 0.0:
            return None
        k2 = SQRT8 * sqrt(w) + forcing(g + 0.5 * h)
        w = v + 0.5 * h * k2
        if w <= 0.0:
            return None
        k3 = SQRT8 * sqrt(w) + forcing(g + 0.5 * h)
        w = v + h * k3
        if w <= 0.0:
            return None
        k4 = SQRT8 * sqrt(w) + forcing(g + h)
        v = v + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        if v <= 0.0:
            return None
    return v


def richardson_end(forcing, m, log2_steps=20):
    fine = rk4_end(forcing, m, log2_steps)
    coarse = rk4_end(forcing, m, log2_steps - 1)
    if fine is None or coarse is None:
        return None
    return fine + (fine - coarse) / 15.0


def bisect(residual, lo, hi, xtol):
    """``residual(lo) < 0 < residual(hi)``; ``None`` counts as negative."""
    while abs(hi - lo) > xtol:
        mid = 0.5 * (lo + hi)
        r = residual(mid)
        if r is None or r < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def mollifier_exact(eps):
    """Closed form of the radial mollifier integral against ``exp(-r^2)``.

    Substituting ``x = r^2`` and integrating by parts gives
    ``1 - eps^2 exp(eps^2) E1(eps^2)``.
    """
    e2 = eps * eps
    return 1.0 - e2 * math.exp(e2) * float(exp1(e2))


def main(log2_steps=20):
    m, beta0 = 1.0, 1.0
    target = 2.0 * (m + 1.0) ** 2
    out = {"oracle": f"classical RK4, h = m * 2^-{log2_steps}, Richardson over (h, 2h); bisection"}

    out["v_end_m1_b1_alpha0"] = richardson_end(conical_forcing(m, beta0, 0.0), m, log2_steps)
    print("v(2) at alpha=0:", repr(out["v_end_m1_b1_alpha0"]), flush=True)

    def conical_res(alpha):
        v = richardson_end(conical_forcing(m, beta0, alpha), m, log2_steps)
        return None if v is None else v - target

    out["alpha_star_m1_b1"] = bisect(conical_res, -1.0, 0.0, 1e-12)
    print("alpha*:", repr(out["alpha_star_m1_b1"]), flush=True)

    def smooth_res(C):
        v = richardson_end(smooth_forcing(m, C), m, log2_steps)
        # Residual decreases in C; flip so that bisect sees an increasing map.
        return None if v is None else target - v

    out["C_star_m1"] = bisect(smooth_res, 2.0, 8.0, 1e-12)
    print("C(1):", repr(out["C_star_m1"]), flush=True)

    def full(alpha):
        return rk4_end(conical_forcing(m, beta0, alpha), m, log2_steps) is not None

    lo, hi = -8.0, 0.0
    while hi - lo > 1e-9:
        mid = 0.5 * (lo + hi)
        if full(mid):
            hi = mid
        else:
            lo = mid
    out["breakdown_boundary_m1_b1"] = 0.5 * (lo + hi)
    print("M(1,1):", repr(out["breakdown_boundary_m1_b1"]), flush=True)

    eps_values = [1e-1, 1e-2, 1e-3, 1e-4]
    out["mollifier_exp_values"] = {repr(e): mollifier_exact(e) for e in eps_values}
    err3 = 1.0 - mollifier_exact(1e-3)
    out["mollifier_err_eps1e-3"] = err3

    # Cone-angle line residual at (m, beta0) = (1, 1) from the two oracle roots.
    c1 = out["C_star_m1"]
    binf = beta0 - out["alpha_star_m1_b1"]
    rhs = m * m * (m * m + 6 * m + 6) / (4 * (m + 1) ** 2) * c1 - m * (m + 2) ** 3 / (2 * (m + 1) ** 2)
    out["line_residual_m1_b1"] = 2 * (m + 3) / (m + 2) * binf - 2 * (2 * m + 3) / (m + 2) * beta0 - rhs
    print(json.dumps(out, indent=2))
    FROZEN.write_text(json.dumps(out, indent=2) + "\n")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 20)
