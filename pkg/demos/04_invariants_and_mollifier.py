"""
Cohomological checks
====================

The Chern number integral is -4 for every solution, conical or smooth.
Volumes and average curvatures follow from the momentum interval alone.
"""

import numpy as np

from calabi.invariants import invariant_report, mollifier_limit
from calabi.profile import profile_from_trajectory
from calabi.shooting import solve_conical, solve_smooth

for beta0 in (0.5, 1.0, 2.0):
    rep = solve_conical(1.0, beta0)
    inv = invariant_report(profile_from_trajectory(rep.trajectory, rep.coeffs), beta0, rep.spec.beta_inf)
    print(f"beta0={beta0}: chern={inv.chern_integral.computed:.14f}  lambda0={inv.lambda0.computed:.14f}  lambda1={inv.lambda1.computed:.10f}")

smooth = solve_smooth(1.0)
inv = invariant_report(profile_from_trajectory(smooth.trajectory, smooth.coeffs), 1.0, 1.0)
print("smooth chern:", inv.chern_integral.computed)

# %%
# The divisor terms are justified by a mollifier whose mass is 1 for every
# width; against a Gaussian the error falls with the width.
eps = [1e-1, 1e-2, 1e-3, 1e-4]
print(mollifier_limit(lambda r: np.ones_like(r), eps))
print([1 - v for v in mollifier_limit(lambda r: np.exp(-r * r), eps)])
