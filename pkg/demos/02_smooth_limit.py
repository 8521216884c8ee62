"""Vanishing noise before and after the breaking time.

For u0 = -tanh(s) characteristics first cross at t* = 1. Before that the
kernel velocity converges to the Burgers solution at rate sigma^2. After it,
the limit is the free-particle superposition of three branches.
"""

import numpy as np

from stochgas import SigmaPair, analytic_profile, breaking_time, characteristic_roots, fields, limit_fields

profile = analytic_profile("tanh-compression", {"a": 1.0})
print("breaking time:", breaking_time(profile).t_star)

xs = np.linspace(-2.0, 2.0, 11)
for t in (0.5, 2.0):
    u_bar = [limit_fields(t, float(x), profile)[1] for x in xs]
    print(f"\nt = {t}")
    for s in (0.1, 0.05, 0.025, 0.0125):
        u = [fields(t, float(x), profile, SigmaPair(s, s)).u for x in xs]
        print(f"  sigma={s:<7} max|u_sigma - u_bar| = {np.max(np.abs(np.subtract(u, u_bar))):.3e}")

cr = characteristic_roots(2.0, 0.3, profile)
print("\nbranches reaching (t=2, x=0.3):", np.round(cr.roots, 6), "weights", np.round(cr.weights, 4))
