"""Initial data (rho0, u0): analytic registry, Riemann steps and mollification.

All component callables are vectorized over numpy arrays and are plain
module-level objects, so profiles pickle cleanly for process pools.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable

import numpy as np
from scipy import integrate as sp_integrate
from scipy.interpolate import CubicHermiteSpline

from .errors import ConfigError, ConstraintError

ANALYTIC = "analytic"
RIEMANN_STEP = "riemann-step"
MOLLIFIED = "mollified"


# --------------------------------------------------------------------------
# density components
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantDensity:
    rho: float = 1.0

    def __call__(self, s):
        return np.full_like(np.asarray(s, dtype=float), self.rho)

    @property
    def bound(self) -> float:
        return self.rho

    def spec(self) -> dict:
        return {"kind": "constant", "params": {"rho": self.rho}}


@dataclass(frozen=True)
class GaussianBump:
    """``base + amplitude * exp(-(s - center)^2 / (2 width^2))``."""

    amplitude: float = 1.0
    width: float = 1.0
    center: float = 0.0
    base: float = 0.0

    def __call__(self, s):
        z = (np.asarray(s, dtype=float) - self.center) / self.width
        return self.base + self.amplitude * np.exp(-0.5 * z * z)

    @property
    def bound(self) -> float:
        return self.base + self.amplitude

    def spec(self) -> dict:
        return {"kind": "gaussian-bump", "params": {
            "amplitude": self.amplitude, "width": self.width,
            "center": self.center, "base": self.base}}


# --------------------------------------------------------------------------
# velocity components
# --------------------------------------------------------------------------

class _Velocity:
    bound: float
    slope_bound: float

    def preimage(self, t: float, x: float, pad: float) -> tuple[float, float]:
        """Interval containing every s with ``|u0(s) t + s - x| <= pad``."""
        half = t * self.bound + pad
        return x - half, x + half


@dataclass(frozen=True)
class ConstantVelocity(_Velocity):
    c: float = 0.0

    def __call__(self, s):
        return np.full_like(np.asarray(s, dtype=float), self.c)

    def derivative(self, s):
        return np.zeros_like(np.asarray(s, dtype=float))

    @property
    def bound(self) -> float:
        return abs(self.c)

    slope_bound = 0.0

    def spec(self) -> dict:
        return {"kind": "constant", "params": {"c": self.c}}


@dataclass(frozen=True)
class LinearRamp(_Velocity):
    """``u0(s) = -a s``; unbounded, so the preimage window is solved exactly."""

    a: float = 1.0

    def __call__(self, s):
        return -self.a * np.asarray(s, dtype=float)

    def derivative(self, s):
        return np.full_like(np.asarray(s, dtype=float), -self.a)

    @property
    def bound(self) -> float:
        return math.inf

    @property
    def slope_bound(self) -> float:
        return abs(self.a)

    def preimage(self, t, x, pad):
        k = 1.0 - self.a * t
        if k == 0.0:
            raise ConfigError("linear ramp is focal at t = 1/a")
        lo, hi = sorted(((x - pad) / k, (x + pad) / k))
        return lo, hi

    def spec(self) -> dict:
        return {"kind": "linear-ramp", "params": {"a": self.a}}


@dataclass(frozen=True)
class TanhCompression(_Velocity):
    """``u0(s) = -amplitude * tanh(a s)``."""

    a: float = 1.0
    amplitude: float = 1.0

    def __call__(self, s):
        return -self.amplitude * np.tanh(self.a * np.asarray(s, dtype=float))

    def derivative(self, s):
        c = np.cosh(self.a * np.asarray(s, dtype=float))
        return -self.amplitude * self.a / (c * c)

    @property
    def bound(self) -> float:
        return abs(self.amplitude)

    @property
    def slope_bound(self) -> float:
        return abs(self.amplitude * self.a)

    def spec(self) -> dict:
        return {"kind": "tanh-compression",
                "params": {"a": self.a, "amplitude": self.amplitude}}


@dataclass(frozen=True)
class Sine(_Velocity):
    """``u0(s) = amplitude * sin(k s)``."""

    amplitude: float = 1.0
    k: float = 1.0

    def __call__(self, s):
        return self.amplitude * np.sin(self.k * np.asarray(s, dtype=float))

    def derivative(self, s):
        return self.amplitude * self.k * np.cos(self.k * np.asarray(s, dtype=float))

    @property
    def bound(self) -> float:
        return abs(self.amplitude)

    @property
    def slope_bound(self) -> float:
        return abs(self.amplitude * self.k)

    def spec(self) -> dict:
        return {"kind": "sine", "params": {"amplitude": self.amplitude, "k": self.k}}


@dataclass(frozen=True)
class Step:
    """``left`` for s < at, ``right`` for s >= at (right-limit at the jump)."""

    left: float
    right: float
    at: float = 0.0

    def __call__(self, s):
        return np.where(np.asarray(s, dtype=float) >= self.at, self.right, self.left)

    @property
    def bound(self) -> float:
        return max(abs(self.left), abs(self.right))

    slope_bound = 0.0

    def preimage(self, t, x, pad):
        half = t * self.bound + pad
        return x - half, x + half


# --------------------------------------------------------------------------
# mollifier
# --------------------------------------------------------------------------

def _bump(z):
    z = np.asarray(z, dtype=float)
    out = np.zeros_like(z)
    inside = np.abs(z) < 1.0
    zi = z[inside]
    out[inside] = np.exp(-1.0 / (1.0 - zi * zi))
    return out


@lru_cache(maxsize=1)
def _bump_mass() -> float:
    val, _ = sp_integrate.quad(lambda z: math.exp(-1.0 / (1.0 - z * z)), -1.0, 1.0,
                               epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def bump_kernel(z):
    """Unit-mass bump on (-1, 1)."""
    return _bump(z) / _bump_mass()


@lru_cache(maxsize=1)
def _bump_cdf_table() -> CubicHermiteSpline:
    # Cumulative mass on [0, 1] by exact per-cell quadrature; odd symmetry
    # gives the negative half and pins the value 1/2 at the origin.
    nodes = np.linspace(0.0, 1.0, 2049)
    f = lambda z: math.exp(-1.0 / (1.0 - z * z)) if abs(z) < 1 else 0.0
    cells = [sp_integrate.quad(f, lo, hi, epsabs=1e-17, epsrel=1e-14)[0]
             for lo, hi in zip(nodes[:-1], nodes[1:])]
    cum = 0.5 + np.concatenate([[0.0], np.cumsum(cells)]) / _bump_mass()
    cum[-1] = 1.0
    return CubicHermiteSpline(nodes, cum, bump_kernel(nodes))


def bump_cdf(z):
    z = np.asarray(z, dtype=float)
    az = np.minimum(np.abs(z), 1.0)
    h = np.clip(_bump_cdf_table()(az), 0.5, 1.0)
    return np.where(z >= 0.0, h, 1.0 - h)


@dataclass(frozen=True)
class MollifierConfig:
    epsilon: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ConfigError("mollifier epsilon must be positive")

    def kernel(self, y):
        return bump_kernel(np.asarray(y, dtype=float) / self.epsilon) / self.epsilon


@dataclass(frozen=True)
class MollifiedStep:
    step: Step
    epsilon: float

    def __call__(self, s):
        z = (np.asarray(s, dtype=float) - self.step.at) / self.epsilon
        return self.step.left + (self.step.right - self.step.left) * bump_cdf(z)

    def derivative(self, s):
        z = (np.asarray(s, dtype=float) - self.step.at) / self.epsilon
        return (self.step.right - self.step.left) * bump_kernel(z) / self.epsilon

    @property
    def bound(self) -> float:
        return self.step.bound

    @property
    def slope_bound(self) -> float:
        return abs(self.step.right - self.step.left) * bump_kernel(0.0) / self.epsilon

    def preimage(self, t, x, pad):
        half = t * self.bound + pad
        return x - half, x + half


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(96)


@dataclass(frozen=True)
class MollifiedSmooth:
    """Numerical convolution of a smooth component with the bump kernel."""

    base: Any
    epsilon: float

    def _convolve(self, f, s):
        s = np.asarray(s, dtype=float)
        y = self.epsilon * _GL_NODES
        w = _GL_WEIGHTS * bump_kernel(_GL_NODES)
        vals = f(s[..., None] - y)
        return vals @ w

    def __call__(self, s):
        return self._convolve(self.base, s)

    def derivative(self, s):
        return self._convolve(self.base.derivative, s)

    @property
    def bound(self) -> float:
        return self.base.bound

    @property
    def slope_bound(self) -> float:
        return self.base.slope_bound

    def preimage(self, t, x, pad):
        if math.isinf(self.base.bound):
            lo, hi = self.base.preimage(t, x, pad + t * self.base.slope_bound * self.epsilon)
            return lo - self.epsilon, hi + self.epsilon
        half = t * self.bound + pad
        return x - half, x + half


# --------------------------------------------------------------------------
# profile
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class InitialProfile:
    """Initial density and velocity with the metadata the solvers rely on.

    ``rho_max``/``u_max`` are the declared bounds, ``du_max`` bounds
    ``|u0'|`` (0 for piecewise-constant data) and ``breakpoints`` lists jump
    locations. ``window`` is where the interesting structure lives; it is
    used by searches that need a finite domain (breaking time, plotting).
    """

    rho0: Callable
    u0: Callable
    u0_prime: Callable | None
    kind: str
    rho_max: float
    u_max: float
    du_max: float
    breakpoints: tuple = ()
    window: tuple = (-10.0, 10.0)
    spec: dict = field(default_factory=dict, compare=False)
    velocity: Any = field(default=None, compare=False, repr=False)

    @property
    def is_c1(self) -> bool:
        return self.u0_prime is not None

    def preimage(self, t: float, x: float, pad: float) -> tuple[float, float]:
        if self.velocity is not None:
            return self.velocity.preimage(t, x, pad)
        half = t * self.u_max + pad
        return x - half, x + half


@dataclass(frozen=True)
class RiemannData:
    rho1: float
    rho2: float
    u1: float
    u2: float

    def __post_init__(self):
        if not self.rho1 > 0 or not self.rho1 + self.rho2 > 0:
            raise ConstraintError(
                f"Riemann densities must be positive on both sides "
                f"(rho1={self.rho1}, rho1+rho2={self.rho1 + self.rho2})")

    def to_dict(self) -> dict:
        return {"rho1": self.rho1, "rho2": self.rho2, "u1": self.u1, "u2": self.u2}


def make_riemann_profile(data: RiemannData) -> InitialProfile:
    rho = Step(data.rho1, data.rho1 + data.rho2)
    vel = Step(data.u1, data.u1 + data.u2)
    return InitialProfile(
        rho0=rho, u0=vel, u0_prime=None, kind=RIEMANN_STEP,
        rho_max=rho.bound, u_max=vel.bound, du_max=0.0,
        breakpoints=(0.0,), window=(-5.0, 5.0),
        spec={"kind": "riemann", "params": data.to_dict()},
        velocity=vel,
    )


def make_profile(density, velocity, spec: dict | None = None,
                 window=(-10.0, 10.0)) -> InitialProfile:
    """Assemble an analytic profile from a density and a C1 velocity component."""
    return InitialProfile(
        rho0=density, u0=velocity, u0_prime=velocity.derivative, kind=ANALYTIC,
        rho_max=density.bound, u_max=velocity.bound, du_max=velocity.slope_bound,
        window=tuple(window),
        spec=spec or {"kind": "composite",
                      "params": {"density": density.spec(), "velocity": velocity.spec()}},
        velocity=velocity,
    )


def mollify(profile: InitialProfile, cfg: MollifierConfig) -> InitialProfile:
    eps = cfg.epsilon
    if profile.kind == RIEMANN_STEP:
        rho = MollifiedStep(profile.rho0, eps)
        vel = MollifiedStep(profile.u0, eps)
    elif profile.is_c1:
        rho = MollifiedSmooth(profile.rho0, eps)
        vel = MollifiedSmooth(profile.velocity, eps)
    else:
        raise ConfigError(f"cannot mollify profile of kind {profile.kind!r}")
    return InitialProfile(
        rho0=rho, u0=vel, u0_prime=vel.derivative, kind=MOLLIFIED,
        rho_max=profile.rho_max, u_max=profile.u_max, du_max=vel.slope_bound,
        breakpoints=(), window=profile.window,
        spec={"kind": "mollified", "params": {"epsilon": eps, "base": profile.spec}},
        velocity=vel,
    )


# --------------------------------------------------------------------------
# registry
# --------------------------------------------------------------------------

_DENSITIES: dict[str, Callable[..., Any]] = {
    "constant": lambda rho=1.0: ConstantDensity(float(rho)),
    "gaussian-bump": lambda amplitude=1.0, width=1.0, center=0.0, base=0.0:
        GaussianBump(float(amplitude), float(width), float(center), float(base)),
}

_VELOCITIES: dict[str, Callable[..., Any]] = {
    "constant": lambda c=0.0: ConstantVelocity(float(c)),
    "linear-ramp": lambda a=1.0: LinearRamp(float(a)),
    "tanh-compression": lambda a=1.0, amplitude=1.0: TanhCompression(float(a), float(amplitude)),
    "sine": lambda amplitude=1.0, k=1.0: Sine(float(amplitude), float(k)),
}

PROFILE_NAMES = ("constant", "linear-ramp", "tanh-compression", "gaussian-bump", "sine")


def _component(table: dict, block, what: str):
    if block is None:
        return None
    if isinstance(block, str):
        block = {"kind": block, "params": {}}
    name = block.get("kind")
    if name not in table:
        raise ConfigError(f"unknown {what} component {name!r}")
    try:
        return table[name](**block.get("params", {}))
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {what} {name!r}: {exc}") from None


def analytic_profile(name: str, params: dict | None = None) -> InitialProfile:
    """Build a registry profile.

    ``constant`` takes ``rho`` and ``u``. Velocity-shaped names
    (``linear-ramp``, ``tanh-compression``, ``sine``) take their own shape
    parameters plus an optional ``density`` block (default constant 1);
    ``gaussian-bump`` takes its shape parameters plus an optional
    ``velocity`` block (default constant 0). Blocks use the same
    ``{"kind": ..., "params": {...}}`` form as full profile specs.
    """
    params = dict(params or {})
    if name not in PROFILE_NAMES:
        raise ConfigError(f"unknown profile {name!r}; expected one of {PROFILE_NAMES}")
    density_block = params.pop("density", None)
    velocity_block = params.pop("velocity", None)
    if name == "constant":
        extra = set(params) - {"rho", "u"}
        if extra:
            raise ConfigError(f"bad parameters for 'constant': {sorted(extra)}")
        density = ConstantDensity(float(params.get("rho", 1.0)))
        velocity = ConstantVelocity(float(params.get("u", 0.0)))
    elif name == "gaussian-bump":
        density = _component(_DENSITIES, {"kind": name, "params": params}, "density")
        velocity = _component(_VELOCITIES, velocity_block, "velocity") or ConstantVelocity(0.0)
    else:
        velocity = _component(_VELOCITIES, {"kind": name, "params": params}, "velocity")
        density = _component(_DENSITIES, density_block, "density") or ConstantDensity(1.0)
    spec = {"kind": name, "params": {**params}}
    if name == "gaussian-bump":
        spec["params"]["velocity"] = velocity.spec()
    elif name != "constant":
        spec["params"]["density"] = density.spec()
    window = (-10.0, 10.0)
    if isinstance(density, GaussianBump):
        window = (density.center - 10 * density.width, density.center + 10 * density.width)
    return make_profile(density, velocity, spec=spec, window=window)


def profile_from_spec(spec: dict) -> InitialProfile:
    """Parse ``{"kind": ..., "params": {...}}`` into a profile."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("profile spec must be an object with a 'kind' key")
    kind = spec["kind"]
    params = dict(spec.get("params", {}))
    if kind == "riemann":
        try:
            data = RiemannData(**{k: float(v) for k, v in params.items()})
        except TypeError as exc:
            raise ConfigError(f"bad Riemann parameters: {exc}") from None
        return make_riemann_profile(data)
    if kind == "mollified":
        if "base" not in params or "epsilon" not in params:
            raise ConfigError("mollified profile needs 'epsilon' and 'base'")
        return mollify(profile_from_spec(params["base"]),
                       MollifierConfig(float(params["epsilon"])))
    if kind == "composite":
        density = _component(_DENSITIES, params.get("density"), "density")
        velocity = _component(_VELOCITIES, params.get("velocity"), "velocity")
        if density is None or velocity is None:
            raise ConfigError("composite profile needs 'density' and 'velocity'")
        return make_profile(density, velocity)
    return analytic_profile(kind, params)


def riemann_data_from_spec(spec: dict) -> RiemannData:
    if spec.get("kind") != "riemann":
        raise ConfigError("expected a profile of kind 'riemann'")
    return RiemannData(**{k: float(v) for k, v in spec.get("params", {}).items()})
