"""
Momentum profile, curvature and the potential
=============================================

``phi = sqrt(2 v) - 2 g`` is the momentum profile.  Its derivatives come from
the ODE, so the higher scalar curvature can be evaluated pointwise and checked
against the constant ``B``.
"""

import numpy as np

from calabi.profile import (
    asymptotic_cone_check,
    higher_scalar_curvature,
    legendre_reconstruct,
    legendre_slopes,
    profile_from_trajectory,
)
from calabi.shooting import solve_conical

report = solve_conical(2.0, 0.5)
profile = profile_from_trajectory(report.trajectory, report.coeffs)
lam = higher_scalar_curvature(profile)
print("B                  :", report.coeffs.B)
print("max |lambda - B|   :", np.abs(lam[1:-1] - report.coeffs.B).max())
print("phi'(1), -phi'(m+1):", profile.dphi[0], -profile.dphi[-1])

# %%
# Near each end ``phi`` vanishes linearly with the cone angle as slope.
print(asymptotic_cone_check(profile), "vs", 0.5, report.spec.beta_inf)

# %%
# ``ds = dtau / phi`` recovers the Legendre dual coordinate; it grows like
# ``ln(tau) / beta0`` at the left end.
rec = legendre_reconstruct(profile)
print("s range:", rec.s_values[0], rec.s_values[-1])
print(legendre_slopes(profile), "vs", 1 / 0.5, -1 / report.spec.beta_inf)
