"""
Where shooting stops working
============================

Too negative a gap drives ``v`` to zero before ``m+1``.  The boundary ``M`` of
the admissible gaps is located by bisection on the full/breakdown label.
"""

from calabi.ivp import endpoint_value, integrate, local_max
from calabi.params import ProblemSpec, conical_coeffs, poly_info, poly_p
from calabi.shooting import locate_breakdown_boundary, shooting_config

m, beta0 = 1.0, 1.0
M = locate_breakdown_boundary(m, beta0)
print(f"M = {M:.12f}")

# %%
# Approaching ``M`` from above, the endpoint value falls to zero linearly.
cfg = shooting_config(1e-10)
for k in range(1, 7):
    alpha = M + 10.0**-k
    v, _ = endpoint_value(conical_coeffs(ProblemSpec(m, beta0, alpha)), m, cfg)
    print(f"alpha = M + 1e-{k}:  v(m+1) = {v:.3e}")

# %%
# Below ``M`` the run breaks down past the root ``gamma0`` of ``p`` and has a
# single maximum where ``v = p^2 g^2 / 8``.
c = conical_coeffs(ProblemSpec(m, beta0, 2 * M))
t = integrate(c, m, cfg)
peak = local_max(t)
print("gamma0     :", poly_info(c, m).gamma0)
print("gamma_star :", t.breakdown.gamma_star)
print("peak       :", peak)
print("identity   :", peak.v_max - poly_p(peak.t_max, c) ** 2 * peak.t_max**2 / 8)
