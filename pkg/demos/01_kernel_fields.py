"""Kernel fields across a compression Riemann fan.

Step data rho = 1 | 2, u = 0 | -1 sends the right stream into the left one.
With weak noise the closed-form kernel fields show three plateaus: the two
free streams and an overlap where density triples and a pressure appears
out of nothing but the velocity spread of the colliding streams.
"""

import numpy as np

from stochgas import RiemannData, SigmaPair, fields, make_riemann_profile, solve_compression

data = RiemannData(rho1=1.0, rho2=1.0, u1=0.0, u2=-1.0)
profile = make_riemann_profile(data)
fan = solve_compression(data)
t = 1.0

print(f"{'x':>6} {'rho':>9} {'u':>9} {'pi':>9} | {'rho_fp':>6} {'u_fp':>7} {'p_fp':>6}")
for x in np.linspace(-1.8, 0.8, 14):
    fs = fields(t, float(x), profile, SigmaPair(0.01, 0.01))
    r, u, p = fan.evaluate(t, x)
    print(f"{x:6.2f} {fs.rho:9.5f} {fs.u:9.5f} {fs.pi:9.5f} | {r:6.3f} {u:7.3f} {p:6.3f}")

# Noise smears the shocks over a width ~ sqrt(Var X) but leaves the plateau values.
for s in (0.1, 0.03, 0.01):
    fs = fields(t, -0.5, profile, SigmaPair(s, s))
    print(f"sigma={s:<5} middle: rho={fs.rho:.5f} u={fs.u:.5f} pi={fs.pi:.5f}")
