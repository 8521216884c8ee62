"""Stochastic regularization of pressureless gas dynamics in one dimension.

Closed-form kernel fields of the noise-perturbed Burgers system, their
small-noise limits along characteristics, Monte Carlo cross-checks, balance
law verification and the free-particle Riemann fan.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    ConstraintError,
    DegenerateRootError,
    DomainError,
    IndeterminateError,
    StochGasError,
    ToleranceError,
    VacuumError,
    WindowError,
)
from .profiles import (  # noqa: E402
    InitialProfile,
    MollifierConfig,
    RiemannData,
    analytic_profile,
    make_riemann_profile,
    mollify,
    profile_from_spec,
)
from .quadrature import QuadratureConfig  # noqa: E402
from .kernel import (  # noqa: E402
    FieldSample,
    SigmaPair,
    fields,
    joint_density,
    rho_sigma,
    spurious_pressure,
    u_sigma,
)
from .characteristics import (  # noqa: E402
    ScanConfig,
    breaking_time,
    characteristic_roots,
    limit_fields,
)
from .riemann import (  # noqa: E402
    GasState,
    ShockFan,
    gamma_from_energy,
    gamma_limit_sweep,
    hugoniot_residuals,
    solve_compression,
)
