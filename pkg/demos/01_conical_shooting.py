"""
Shooting for a conical metric
=============================

Fix the size ``m`` of the momentum interval and the cone angle ``beta0``
along the zero section.  The second cone angle is unknown; it is encoded in
the gap ``alpha = beta0 - beta_inf`` and found by shooting on
``v(m+1) = 2 (m+1)^2``.
"""

from calabi.shooting import solve_conical

report = solve_conical(m=1.0, beta0=1.0)
print(f"alpha*   = {report.spec.alpha:.15f}")
print(f"beta_inf = {report.spec.beta_inf:.15f}")
print(f"residual = {report.residual:.2e} after {report.iterations} iterations")

# %%
# Every probe is kept.  ``None`` marks a run that broke down before ``m+1``,
# which the root finder treats as lying below the target.
for probe in report.bracket_history:
    print(f"{probe.parameter: .12f}  {probe.residual}")

# %%
# The solved trajectory stays above the model cone ``2 g^2`` inside the
# interval; that is what makes ``phi`` positive.
t = report.trajectory
inside = slice(1, -1)
print("min v - 2g^2 inside:", (t.values[inside] - 2 * t.grid[inside] ** 2).min())
