"""Finite-difference checks of the viscous balance laws satisfied by the
kernel fields, the pressure-gradient identity for the integral term, and
conservation of total mass and momentum.

In one dimension the fields obey

    d_t rho + d_x(rho u) = sigma1^2/2 d_xx rho
    d_t(rho u) + d_x(rho u^2 + pi) = sigma1^2/2 d_xx(rho u)

where pi is the spurious pressure; the integral term of the momentum law is
d_x pi because int (u - u_sigma) P du = 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate as sp_integrate

from .characteristics import ScanConfig, limit_fields
from .errors import ConfigError, DomainError, WindowError
from .kernel import SigmaPair, fields, joint_density, velocity_window
from .profiles import InitialProfile
from .quadrature import QuadratureConfig, integrate


@dataclass(frozen=True)
class GridSpec:
    """Sample nodes on ``[t_min, t_max] x [x_min, x_max]`` and stencil step ``h``.

    The nodes do not move with ``h`` (h_t = h_x = h), so residuals for
    different steps are compared at identical points.
    """

    t_min: float
    t_max: float
    n_t: int
    x_min: float
    x_max: float
    n_x: int
    h: float

    def __post_init__(self):
        if self.h <= 0 or self.n_t < 1 or self.n_x < 1:
            raise ConfigError("grid needs h > 0 and at least one node per axis")
        if self.t_min - self.h <= 0:
            raise ConfigError("time stencil must stay in t > 0")

    @property
    def t_nodes(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.n_t)

    @property
    def x_nodes(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_x)

    def with_h(self, h: float) -> "GridSpec":
        return GridSpec(self.t_min, self.t_max, self.n_t, self.x_min, self.x_max, self.n_x, h)

    def to_dict(self) -> dict:
        return asdict(self)


def _norms(r: np.ndarray) -> dict:
    r = np.asarray(r, float).ravel()
    return {"max": float(np.max(np.abs(r))), "l2": float(np.sqrt(np.mean(r * r)))}


class _FieldCache:
    def __init__(self, profile, sigma, cfg):
        self.profile, self.sigma, self.cfg = profile, sigma, cfg
        self._store = {}
        self.max_err = 0.0

    def __call__(self, t, x):
        key = (float(t), float(x))
        if key not in self._store:
            fs = fields(key[0], key[1], self.profile, self.sigma, self.cfg)
            self.max_err = max(self.max_err, fs.err_estimate)
            self._store[key] = (fs.rho, fs.u, fs.pi)
        return self._store[key]


def _stencil_residuals(profile, sigma, grid: GridSpec, cfg):
    cache = _FieldCache(profile, sigma, cfg)
    h = grid.h
    nu = 0.5 * sigma.sigma1 ** 2
    tt, xx = grid.t_nodes, grid.x_nodes
    cont = np.empty((tt.size, xx.size))
    mom = np.empty_like(cont)
    for i, t in enumerate(tt):
        for j, x in enumerate(xx):
            c = cache(t, x)
            tp, tm = cache(t + h, x), cache(t - h, x)
            xp, xm = cache(t, x + h), cache(t, x - h)
            q = lambda f: f[0] * f[1]
            flux = lambda f: f[0] * f[1] ** 2 + f[2]
            cont[i, j] = ((tp[0] - tm[0]) + (q(xp) - q(xm))) / (2 * h) \
                - nu * (xp[0] - 2 * c[0] + xm[0]) / h ** 2
            mom[i, j] = ((q(tp) - q(tm)) + (flux(xp) - flux(xm))) / (2 * h) \
                - nu * (q(xp) - 2 * q(c) + q(xm)) / h ** 2
    budget = cache.max_err * (2.0 / h + 4.0 * nu / h ** 2)
    return cont, mom, budget


def residual_continuity(profile, sigma, grid: GridSpec, cfg=None) -> dict:
    cont, _, budget = _stencil_residuals(profile, sigma, grid, cfg or QuadratureConfig())
    return {**_norms(cont), "quadrature_budget": budget, "values": cont}


def residual_momentum(profile, sigma, grid: GridSpec, cfg=None) -> dict:
    _, mom, budget = _stencil_residuals(profile, sigma, grid, cfg or QuadratureConfig())
    return {**_norms(mom), "quadrature_budget": budget, "values": mom}


def balance_residuals(profile, sigma, grid: GridSpec, cfg=None) -> dict:
    """Both residuals from one set of field evaluations."""
    cont, mom, budget = _stencil_residuals(profile, sigma, grid, cfg or QuadratureConfig())
    return {"continuity": _norms(cont), "momentum": _norms(mom),
            "quadrature_budget": budget, "continuity_values": cont, "momentum_values": mom}


# --------------------------------------------------------------------------
# integral term
# --------------------------------------------------------------------------

_D5 = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
_D5_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])


def _d5(values, delta):
    return np.tensordot(_D5, values, axes=(0, 0)) / delta


def i_sigma_direct(t: float, x: float, profile: InitialProfile, sigma: SigmaPair,
                   cfg: QuadratureConfig | None = None, delta: float = 5e-3) -> float:
    """int (u - u_sigma)^2 d_x P du with d_x P by a five-point difference."""
    cfg = cfg or QuadratureConfig()
    if sigma.sigma2 <= 0:
        raise DomainError("the direct integral needs sigma2 > 0")
    u_mean = fields(t, x, profile, sigma, cfg).u
    xs = x + delta * _D5_OFFSETS
    wins = [velocity_window(t, float(xi), profile, sigma, cfg) for xi in (xs[0], xs[-1])]
    lo = min(w[0] for w in wins)
    hi = max(w[1] for w in wins)

    def f(u):
        p = np.stack([joint_density(t, float(xi), u, profile, sigma, cfg) for xi in xs])
        return (u - u_mean) ** 2 * _d5(p, delta)

    r = integrate(f, np.linspace(lo, hi, 17), cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions)
    return float(r.value[0])


def pressure_gradient(t, x, profile, sigma, cfg=None, delta: float = 5e-3) -> float:
    cfg = cfg or QuadratureConfig()
    vals = np.array([fields(t, float(x + d * delta), profile, sigma, cfg).pi
                     for d in _D5_OFFSETS])
    return float(_d5(vals, delta))


def i_sigma_identity(t, x, profile, sigma, cfg=None, delta: float = 5e-3) -> dict:
    """Compare the direct integral with d_x pi.

    The tolerance combines a Richardson estimate of the difference-stencil
    truncation (steps delta and 2 delta) for both routes with the quadrature
    error amplified by the stencil, times a safety factor of 10.
    """
    cfg = cfg or QuadratureConfig()
    direct = i_sigma_direct(t, x, profile, sigma, cfg, delta)
    direct2 = i_sigma_direct(t, x, profile, sigma, cfg, 2 * delta)
    grad = pressure_gradient(t, x, profile, sigma, cfg, delta)
    grad2 = pressure_gradient(t, x, profile, sigma, cfg, 2 * delta)
    pi = fields(t, x, profile, sigma, cfg).pi
    trunc = (abs(direct - direct2) + abs(grad - grad2)) / 15.0
    quad = cfg.rel_tol * max(pi, 1.0) * np.abs(_D5).sum() / delta
    tol = 10.0 * (trunc + quad) + 10 * cfg.abs_tol
    return {"t": t, "x": x, "direct": direct, "grad_pi": grad,
            "diff": abs(direct - grad), "tolerance": float(tol)}


def integral_term_decay(profile: InitialProfile, t: float, xs, sigmas,
                        cfg: QuadratureConfig | None = None, delta: float = 5e-3) -> dict:
    """How fast ``max |I_sigma|`` over ``xs`` falls as both noise amplitudes shrink.

    ``I_sigma`` is evaluated as ``d_x pi_sigma``. The observed rate is the
    least-squares slope of log max|I| against log sigma; no rate is assumed.
    """
    sigmas = [float(s) for s in sigmas]
    peaks = [max(abs(pressure_gradient(t, float(x), profile, SigmaPair(s, s), cfg, delta))
                 for x in xs) for s in sigmas]
    rate = float("nan")
    if len(sigmas) >= 2 and all(p > 0 for p in peaks):
        rate = float(np.polyfit(np.log(sigmas), np.log(peaks), 1)[0])
    return {"t": float(t), "sigma": sigmas, "max_abs_i_sigma": peaks, "observed_rate": rate}


# --------------------------------------------------------------------------
# conservation
# --------------------------------------------------------------------------

def _tail_mass(profile: InitialProfile, window) -> tuple[float, float]:
    lo, hi = window
    r = lambda s: float(profile.rho0(np.array(s)))
    left, _ = sp_integrate.quad(r, -np.inf, lo, epsabs=1e-30, limit=200)
    right, _ = sp_integrate.quad(r, hi, np.inf, epsabs=1e-30, limit=200)
    inside, _ = sp_integrate.quad(r, lo, hi, epsabs=1e-14, limit=200,
                                  points=[b for b in profile.breakpoints if lo < b < hi] or None)
    return left + right, inside


def conserved_totals(profile: InitialProfile, sigma: SigmaPair, window, t_list,
                     cfg: QuadratureConfig | None = None, tail_tol: float = 1e-12,
                     panels: int = 40) -> dict:
    """Total mass and momentum on ``window`` at each time."""
    cfg = cfg or QuadratureConfig()
    lo, hi = float(window[0]), float(window[1])
    tail, inside = _tail_mass(profile, (lo, hi))
    if not math.isfinite(inside) or not math.isfinite(tail) or tail > tail_tol * max(inside, 1.0):
        raise WindowError(f"rho0 mass outside [{lo}, {hi}] is {tail:.3g}")
    edges = np.linspace(lo, hi, panels + 1)
    mass, momentum = [], []
    for t in t_list:
        t = float(t)
        if t == 0:
            f = lambda xs: np.stack([profile.rho0(xs), profile.rho0(xs) * profile.u0(xs)])
        else:
            def f(xs, t=t):
                out = np.empty((2, xs.size))
                for k, xv in enumerate(xs):
                    fs = fields(t, float(xv), profile, sigma, cfg)
                    out[0, k], out[1, k] = fs.rho, fs.rho * fs.u
                return out
        r = integrate(f, edges, 1e-11, 1e-14, cfg.max_subdivisions)
        mass.append(float(r.value[0]))
        momentum.append(float(r.value[1]))
    return {"t": [float(t) for t in t_list], "mass": mass, "momentum": momentum}


def relative_drift(series) -> float:
    series = np.asarray(series, float)
    ref = abs(series[0])
    if ref == 0:
        raise ConfigError("relative drift undefined for a zero initial total")
    return float(np.max(np.abs(series - series[0])) / ref)


# --------------------------------------------------------------------------
# limit system
# --------------------------------------------------------------------------

def pressureless_residual(profile: InitialProfile, grid: GridSpec,
                          scan: ScanConfig | None = None) -> dict:
    """Residuals of the pressureless system on the free-particle limit fields."""
    h = grid.h
    cont, mom = [], []
    for t in grid.t_nodes:
        for x in grid.x_nodes:
            v = {k: limit_fields(t + dt, x + dx, profile, scan)
                 for k, (dt, dx) in {"tp": (h, 0), "tm": (-h, 0), "xp": (0, h), "xm": (0, -h)}.items()}
            q = {k: r * u for k, (r, u) in v.items()}
            cont.append((v["tp"][0] - v["tm"][0] + q["xp"] - q["xm"]) / (2 * h))
            mom.append((q["tp"] - q["tm"] + q["xp"] * v["xp"][1] - q["xm"] * v["xm"][1]) / (2 * h))
    return {"continuity": _norms(cont), "momentum": _norms(mom)}


# --------------------------------------------------------------------------
# report
# --------------------------------------------------------------------------

@dataclass
class ResidualReport:
    grid: dict
    continuity_residual: dict
    momentum_residual: dict
    i_sigma_check: dict
    totals: dict
    budgets: dict = field(default_factory=dict)
    refinement: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def residual_report(profile: InitialProfile, sigma: SigmaPair, grid: GridSpec,
                    cfg: QuadratureConfig | None = None, i_sigma_points=(),
                    totals_window=None, t_list=(), refine: bool = True,
                    coarse: dict | None = None) -> ResidualReport:
    """Residual norms at ``h`` (and ``h/2`` when ``refine``), identity checks
    at ``i_sigma_points`` and conserved totals when a window is given.

    ``coarse`` may pass in an existing ``balance_residuals`` result for ``grid``.
    """
    cfg = cfg or QuadratureConfig()
    if coarse is None:
        coarse = balance_residuals(profile, sigma, grid, cfg)
    refinement = {}
    if refine:
        fine = balance_residuals(profile, sigma, grid.with_h(grid.h / 2), cfg)
        refinement = {
            "h_fine": grid.h / 2,
            "continuity_fine": fine["continuity"], "momentum_fine": fine["momentum"],
            "continuity_ratio": {k: coarse["continuity"][k] / fine["continuity"][k]
                                 for k in ("max", "l2")},
            "momentum_ratio": {k: coarse["momentum"][k] / fine["momentum"][k]
                               for k in ("max", "l2")},
        }
    checks = [i_sigma_identity(t, x, profile, sigma, cfg) for t, x in i_sigma_points]
    i_check = {}
    if checks:
        i_check = {"max_diff": max(c["diff"] for c in checks),
                   "all_within_tolerance": all(c["diff"] <= c["tolerance"] for c in checks),
                   "points": checks}
    totals = {}
    if totals_window is not None and len(t_list):
        totals = conserved_totals(profile, sigma, totals_window, t_list, cfg)
        totals["mass_drift"] = relative_drift(totals["mass"])
        if totals["momentum"][0] != 0:
            totals["momentum_drift"] = relative_drift(totals["momentum"])
    return ResidualReport(
        grid=grid.to_dict(),
        continuity_residual=coarse["continuity"],
        momentum_residual=coarse["momentum"],
        i_sigma_check=i_check,
        totals=totals,
        budgets={"quadrature_term": coarse["quadrature_budget"],
                 "truncation_order": 2},
        refinement=refinement,
    )
