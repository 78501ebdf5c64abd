"""
Futaki invariant and the cone-angle line
========================================

The invariant vanishes on every conical solution.  At the smooth
higher-extremal metric it has a closed form that is affine in the two cone
angles; its zero set is a straight line.
"""

from calabi.futaki import cone_angle_line, conjecture_probe, logbf_conical, logbf_extremal_closed_form, logbf_smooth_quadrature
from calabi.profile import profile_from_trajectory
from calabi.shooting import solve_conical, solve_smooth

m = 1.0
con = solve_conical(m, 1.0)
print("conical:", logbf_conical(m, 1.0, con.spec.beta_inf, profile_from_trajectory(con.trajectory, con.coeffs)).value)

smooth = solve_smooth(m)
p = profile_from_trajectory(smooth.trajectory, smooth.coeffs)
for b0, binf in [(0.5, 0.8), (1.0, 1.0), (2.0, 1.3)]:
    print(b0, binf, logbf_smooth_quadrature(m, b0, binf, p).value, logbf_extremal_closed_form(m, smooth.C_star, b0, binf))

# %%
# The probe compares the conical solve with the line.  The residual is an
# observation: it is small but not zero on this grid.
line = cone_angle_line(m, smooth.C_star)
print(line)
print("beta_inf shooting:", con.spec.beta_inf, " on line:", line.beta_inf_on_line(1.0))
print("residual:", conjecture_probe(m, 1.0, con, smooth))
