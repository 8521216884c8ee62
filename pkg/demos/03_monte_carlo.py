"""Particles against the closed form.

The SDE is linear, so each particle is drawn from its exact Gaussian law at
time t. Binned density and mean velocity are compared with bin averages of
the kernel fields through z-scores.
"""

import numpy as np

from stochgas import RiemannData, SigmaPair, make_riemann_profile
from stochgas.montecarlo import compare_with_kernel, estimate_fields, sample_ensemble, z_summary

profile = make_riemann_profile(RiemannData(1.0, 1.0, 0.0, -1.0))
sigma = SigmaPair(0.05, 0.05)
ens = sample_ensemble(profile, sigma, 1.0, 10 ** 6, seed=1, window=(-5, 5), chunk_count=8)
binned = estimate_fields(ens, np.linspace(-3, 2, 201))
cmp = compare_with_kernel(binned, 1.0, profile, sigma)

for key in ("z_rho", "z_u", "z_var"):
    print(key, z_summary(cmp[key]))

k = int(np.argmin(np.abs(binned.centers + 0.5)))
print(f"bin at x={binned.centers[k]:.3f}: density {binned.density[k]:.4f} +- {binned.density_se[k]:.4f}, "
      f"velocity {binned.mean_u[k]:.4f} +- {binned.mean_u_se[k]:.4f}")
