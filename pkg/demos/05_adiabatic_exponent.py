"""Which polytropic law do the free-particle shocks obey?

Both shocks of the compression fan satisfy mass and momentum balance
exactly. Asking the energy condition to hold too fixes an adiabatic exponent
per shock; as the density jump rho2 / rho1 shrinks, both tend to 3, the
one-dimensional monoatomic value. Read the other way round (rho1 / rho2 to
zero) the left exponent tends to 1 instead.
"""

from stochgas import gamma_limit_sweep

ratios = [1.0, 0.1, 0.01, 0.001]
print("rho2/rho1   gamma_left   gamma_right")
for row in gamma_limit_sweep(ratios):
    print(f"{row['ratio']:<10g} {row['gamma_left']:11.6f} {row['gamma_right']:12.6f}")
print("\nrho1/rho2   gamma_left   gamma_right")
for row in gamma_limit_sweep(ratios, inverse=True):
    print(f"{row['ratio']:<10g} {row['gamma_left']:11.6f} {row['gamma_right']:12.4f}")
