"""Free-particle Riemann solution for compression data and Hugoniot algebra.

For step data (rho1, u1 | rho1 + rho2, u1 + u2) with u2 < 0, the two free
streams overlap on (u1 + u2) t < x < u1 t. The overlap carries the summed
density, the mass-weighted mean velocity and a pressure equal to density
times the velocity variance of the two-stream mixture.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError, IndeterminateError
from .profiles import RiemannData


@dataclass(frozen=True)
class GasState:
    rho: float
    u: float
    p: float = 0.0

    def __post_init__(self):
        if self.rho < 0 or self.p < 0:
            raise DomainError("density and pressure must be nonnegative")

    @property
    def momentum(self) -> float:
        return self.rho * self.u

    def energy(self, gamma: float) -> float:
        return 0.5 * self.rho * self.u ** 2 + self.p / (gamma - 1.0)

    def boosted(self, c: float) -> "GasState":
        return GasState(self.rho, self.u + c, self.p)


@dataclass(frozen=True)
class ShockFan:
    left: GasState
    middle: GasState
    right: GasState
    speed_left: float
    speed_right: float

    def evaluate(self, t: float, x):
        """(rho, u, p) at time t; shock lines take the value on their right."""
        if t <= 0:
            raise DomainError("the fan is defined for t > 0")
        x = np.asarray(x, dtype=float)
        states = (self.left, self.middle, self.right)
        region = (x >= self.speed_left * t).astype(int) + (x >= self.speed_right * t)
        out = [np.choose(region, [getattr(s, k) for s in states]) for k in ("rho", "u", "p")]
        return tuple(out)

    def to_dict(self) -> dict:
        return {"left": asdict(self.left), "middle": asdict(self.middle),
                "right": asdict(self.right),
                "speed_left": self.speed_left, "speed_right": self.speed_right}


def middle_state(data: RiemannData) -> GasState:
    r1, r2, u1, u2 = data.rho1, data.rho2, data.u1, data.u2
    rho = 2 * r1 + r2
    u = u1 + u2 * (r1 + r2) / rho
    p = r1 * (r1 + r2) * u2 * u2 / rho
    return GasState(rho, u, p)


def solve_compression(data: RiemannData, t: float = 1.0) -> ShockFan:
    if data.u2 >= 0:
        raise DomainError("only compression data (u2 < 0) has an exact free-particle fan here")
    if t <= 0:
        raise DomainError("t must be positive")
    return ShockFan(
        left=GasState(data.rho1, data.u1, 0.0),
        middle=middle_state(data),
        right=GasState(data.rho1 + data.rho2, data.u1 + data.u2, 0.0),
        speed_left=data.u1 + data.u2,
        speed_right=data.u1,
    )


@dataclass(frozen=True)
class HugoniotResiduals:
    r_mass: float
    r_momentum: float
    r_energy: float | None


def hugoniot_residuals(left: GasState, right: GasState, D: float,
                       gamma: float | None = None) -> HugoniotResiduals:
    """Jump residuals ``D[q] - [flux(q)]`` with ``[f] = f_right - f_left``.

    The energy residual needs ``gamma > 1``; pass ``None`` to skip it.
    """
    def jump(f):
        return f(right) - f(left)

    r_mass = D * jump(lambda s: s.rho) - jump(lambda s: s.rho * s.u)
    r_mom = D * jump(lambda s: s.rho * s.u) - jump(lambda s: s.rho * s.u ** 2 + s.p)
    r_en = None
    if gamma is not None:
        if gamma <= 1:
            raise DomainError("energy residual needs gamma > 1")
        r_en = D * jump(lambda s: s.energy(gamma)) - jump(lambda s: (s.energy(gamma) + s.p) * s.u)
    return HugoniotResiduals(r_mass, r_mom, r_en)


def _beta(left: GasState, right: GasState, D: float) -> float:
    # r_energy is affine in beta = 1/(gamma - 1):
    #   beta * ((D - u_R) p_R - (D - u_L) p_L) = [rho u^3 / 2 + p u] - D [rho u^2 / 2]
    coef = (D - right.u) * right.p - (D - left.u) * left.p
    if coef == 0.0:
        raise IndeterminateError("energy condition does not involve gamma (no pressure work)")
    flux = (0.5 * right.rho * right.u ** 3 + right.p * right.u) \
        - (0.5 * left.rho * left.u ** 3 + left.p * left.u)
    kin = 0.5 * right.rho * right.u ** 2 - 0.5 * left.rho * left.u ** 2
    return (flux - D * kin) / coef


def gamma_lab_frame(left: GasState, right: GasState, D: float) -> float:
    """Exponent from the energy condition written with lab-frame velocities.

    Algebraically equal to ``gamma_from_energy`` but loses digits to
    cancellation when the flow speed is large compared to the jump.
    """
    beta = _beta(left, right, D)
    if beta == 0.0:
        raise IndeterminateError("energy condition forces an infinite exponent")
    return 1.0 + 1.0 / beta


def gamma_from_energy(left: GasState, right: GasState, D: float) -> float:
    """Adiabatic exponent that closes the energy jump condition.

    Velocities are taken relative to the shock, where the bracket reduces to
    ``beta [p w] = -[rho w^3 / 2 + p w]`` for ``w = u - D`` once mass and
    momentum balance hold; the same code path serves both shocks.
    """
    return gamma_lab_frame(left.boosted(-D), right.boosted(-D), 0.0)


def shock_gammas(data: RiemannData) -> tuple[float, float]:
    fan = solve_compression(data)
    g_left = gamma_from_energy(fan.left, fan.middle, fan.speed_left)
    g_right = gamma_from_energy(fan.middle, fan.right, fan.speed_right)
    return g_left, g_right


def gamma_limit_sweep(ratios, u2: float = -1.0, inverse: bool = False) -> list[dict]:
    """Exponents at both shocks for ``rho2 / rho1`` in ``ratios`` (rho1 = 1).

    With ``inverse=True`` the ratios are read as ``rho1 / rho2`` (rho2 = 1)
    instead. The exponents do not depend on the velocities; ``u2`` only has
    to be a compression jump.
    """
    rows = []
    for r in ratios:
        if not r > 0:
            raise DomainError("density ratios must be positive")
        data = RiemannData(float(r), 1.0, 0.0, u2) if inverse else RiemannData(1.0, float(r), 0.0, u2)
        gl, gr = shock_gammas(data)
        rows.append({"ratio": float(r), "gamma_left": gl, "gamma_right": gr,
                     "dev_left": abs(gl - 3.0), "dev_right": abs(gr - 3.0)})
    return rows
