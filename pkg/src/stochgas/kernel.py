"""Closed-form kernel fields of the stochastically perturbed Burgers system.

Given s, the pair (X, U) at time t is Gaussian with mean (s + u0(s) t, u0(s))
and covariance

    Var X = sigma1^2 t + sigma2^2 t^3 / 3,  Cov = sigma2^2 t^2 / 2,  Var U = sigma2^2 t,

so every field is an integral over s of a Gaussian weight in
g(s) = u0(s) t + s - x. All weights are handled in log form with the peak
log-weight subtracted before exponentiation, and the s-integral is
restricted to the set where the log-weight is within ``exp_cutoff`` of the
peak.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .characteristics import bisect_roots, sign_change_brackets
from .errors import ConfigError, DomainError, VacuumError
from .profiles import InitialProfile
from .quadrature import QuadratureConfig, integrate

VACUUM_FLOOR = 1e-300
_PANEL_GROUP = 4


@dataclass(frozen=True)
class SigmaPair:
    sigma1: float
    sigma2: float

    def __post_init__(self):
        if self.sigma1 < 0 or self.sigma2 < 0:
            raise ConfigError("noise amplitudes must be nonnegative")
        if self.sigma1 == 0 and self.sigma2 == 0:
            raise ConfigError("at least one noise amplitude must be positive")

    @classmethod
    def both(cls, sigma: float) -> "SigmaPair":
        return cls(sigma, sigma)

    def scaled(self, factor: float) -> "SigmaPair":
        return SigmaPair(self.sigma1 * factor, self.sigma2 * factor)

    def to_dict(self) -> dict:
        return {"sigma1": self.sigma1, "sigma2": self.sigma2}


@dataclass(frozen=True)
class Moments:
    """Second-order statistics of (X, U) given the starting point s."""

    var_x: float
    cov: float
    var_u: float

    @property
    def gain(self) -> float:
        # slope of E[U | X] in X
        return self.cov / self.var_x

    @property
    def cond_var(self) -> float:
        # Var(U | X) = sigma2^2 t (12 sigma1^2 + sigma2^2 t^2) / (4 (3 sigma1^2 + sigma2^2 t^2))
        return self.var_u - self.cov * self.cov / self.var_x


def transition_moments(t: float, sigma: SigmaPair) -> Moments:
    s1, s2 = sigma.sigma1 ** 2, sigma.sigma2 ** 2
    return Moments(var_x=s1 * t + s2 * t ** 3 / 3.0, cov=s2 * t * t / 2.0, var_u=s2 * t)


def conditional_variance(t: float, sigma: SigmaPair) -> float:
    """Closed form of Var(U | X = x) for a single starting point."""
    s1, s2 = sigma.sigma1 ** 2, sigma.sigma2 ** 2
    return s2 * t * (12 * s1 + s2 * t * t) / (4 * (3 * s1 + s2 * t * t))


@dataclass(frozen=True)
class FieldSample:
    t: float
    x: float
    rho: float
    u: float
    pi: float
    err_estimate: float
    rho_err: float = 0.0
    u_err: float = 0.0
    pi_err: float = 0.0


# --------------------------------------------------------------------------
# truncation of the s-domain
# --------------------------------------------------------------------------

def _panels_from_mask(nodes: np.ndarray, keep: np.ndarray, special: np.ndarray) -> list:
    """Edges of panels covering runs of kept nodes, padded by one node each side.

    Every ``_PANEL_GROUP``-th node is an edge; ``special`` points (roots and
    jumps) are always edges.
    """
    n = nodes.size
    edges = []
    if not keep.any():
        return edges
    k = keep.astype(np.int8)
    d = np.diff(np.concatenate([[0], k, [0]]))
    starts = np.nonzero(d == 1)[0]
    stops = np.nonzero(d == -1)[0]  # exclusive
    for a, b in zip(starts, stops):
        i0 = max(a - 1, 0)
        i1 = min(b, n - 1)
        run = nodes[i0:i1 + 1]
        pick = run[::_PANEL_GROUP]
        inner = special[(special > run[0]) & (special < run[-1])]
        e = np.unique(np.concatenate([pick, [run[-1]], inner]))
        if e.size >= 2:
            edges.append(e)
    return edges


def _integrate_runs(f, runs, cfg: QuadratureConfig):
    panels = np.concatenate([np.column_stack([e[:-1], e[1:]]) for e in runs])
    return integrate(f, panels, cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions)


def _scan_grid(lo: float, hi: float, width: float, cfg: QuadratureConfig) -> np.ndarray:
    n = int(math.ceil((hi - lo) / (0.25 * width))) + 1 if width > 0 else cfg.max_scan_nodes
    n = min(max(n, cfg.scan_nodes), cfg.max_scan_nodes)
    return np.linspace(lo, hi, n)


@dataclass
class _PositionalPhase:
    t: float
    x: float
    mom: Moments
    runs: list
    peak: float
    nodes: np.ndarray
    keep: np.ndarray

    @property
    def log_prefactor(self) -> float:
        return -0.5 * math.log(2.0 * math.pi * self.mom.var_x)


def _positional_phase(t: float, x: float, profile: InitialProfile, sigma: SigmaPair,
                      cfg: QuadratureConfig) -> _PositionalPhase:
    mom = transition_moments(t, sigma)
    sd = math.sqrt(mom.var_x)
    pad = cfg.margin + math.sqrt(2.0 * cfg.exp_cutoff) * sd
    lo, hi = profile.preimage(t, x, pad)
    grid = _scan_grid(lo, hi, sd / (1.0 + t * profile.du_max), cfg)

    def g(s):
        return profile.u0(s) * t + s - x

    gs = g(grid)
    zeros, idx = sign_change_brackets(grid, gs)
    roots = bisect_roots(g, grid[idx], grid[idx + 1], gs[idx]) if idx.size else np.empty(0)
    bps = np.array([b for b in profile.breakpoints if lo < b < hi], dtype=float)
    special = np.unique(np.concatenate([zeros, roots, bps]))
    nodes = np.unique(np.concatenate([grid, special]))
    with np.errstate(divide="ignore"):
        logw = np.log(profile.rho0(nodes)) - g(nodes) ** 2 / (2.0 * mom.var_x)
    peak = float(np.max(logw))
    if not np.isfinite(peak):
        return _PositionalPhase(t, x, mom, [], -math.inf, nodes, np.zeros(nodes.size, bool))
    keep = logw >= peak - cfg.exp_cutoff
    runs = _panels_from_mask(nodes, keep, special)
    return _PositionalPhase(t, x, mom, runs, peak, nodes, keep)


def _log_weight(s, t, x, profile, mom: Moments, peak: float):
    g = profile.u0(s) * t + s - x
    with np.errstate(divide="ignore"):
        return np.log(profile.rho0(s)) - g * g / (2.0 * mom.var_x) - peak, g


# --------------------------------------------------------------------------
# marginal fields
# --------------------------------------------------------------------------

def _check_t(t: float):
    if t < 0:
        raise DomainError("t must be nonnegative")


def fields(t: float, x: float, profile: InitialProfile, sigma: SigmaPair,
           cfg: QuadratureConfig | None = None) -> FieldSample:
    """Density, mean velocity and spurious pressure at one point.

    The pressure is ``int (u - u_sigma)^2 P du``: the conditional variance
    plus the spread of conditional means, integrated against the positional
    weight after the mean velocity is known.
    """
    cfg = cfg or QuadratureConfig()
    _check_t(t)
    if t == 0:
        return FieldSample(0.0, x, float(profile.rho0(np.array(x))),
                           float(profile.u0(np.array(x))), 0.0, 0.0)
    ph = _positional_phase(t, x, profile, sigma, cfg)
    if not ph.runs:
        raise VacuumError(f"density vanishes on the integration domain at (t={t}, x={x})")
    mom = ph.mom
    gain = mom.gain

    def first(s):
        lw, g = _log_weight(s, t, x, profile, mom, ph.peak)
        w = np.exp(lw)
        m = profile.u0(s) - gain * g
        return np.stack([w, w * m])

    r1 = _integrate_runs(first, ph.runs, cfg)
    m0, m1 = r1.value
    if m0 < VACUUM_FLOOR:
        raise VacuumError(f"normalized density underflow at (t={t}, x={x})")
    scale = math.exp(ph.log_prefactor + ph.peak)
    rho = scale * m0
    u = m1 / m0

    def second(s):
        lw, g = _log_weight(s, t, x, profile, mom, ph.peak)
        dm = profile.u0(s) - gain * g - u
        return np.exp(lw) * dm * dm

    r2 = _integrate_runs(second, ph.runs, cfg)
    cv = mom.cond_var
    pi = rho * cv + scale * float(r2.value[0])
    rho_err = scale * r1.error[0]
    u_err = (r1.error[1] + abs(u) * r1.error[0]) / m0
    pi_err = scale * float(r2.error[0]) + cv * rho_err
    return FieldSample(t, x, float(rho), float(u), float(pi),
                       float(max(rho_err, u_err, pi_err)),
                       float(rho_err), float(u_err), float(pi_err))


def rho_sigma(t, x, profile, sigma, cfg=None) -> float:
    cfg = cfg or QuadratureConfig()
    _check_t(t)
    if t == 0:
        return float(profile.rho0(np.array(x)))
    ph = _positional_phase(t, x, profile, sigma, cfg)
    if not ph.runs:
        return 0.0

    def w(s):
        return np.exp(_log_weight(s, t, x, profile, ph.mom, ph.peak)[0])

    r = _integrate_runs(w, ph.runs, cfg)
    return math.exp(ph.log_prefactor + ph.peak) * float(r.value[0])


def u_sigma(t, x, profile, sigma, cfg=None) -> float:
    return fields(t, x, profile, sigma, cfg).u


def spurious_pressure(t, x, profile, sigma, cfg=None) -> float:
    return fields(t, x, profile, sigma, cfg).pi


def field_arrays(ts, xs, profile, sigma, cfg=None):
    """Evaluate ``fields`` at paired points; returns dict of arrays."""
    ts = np.broadcast_to(np.asarray(ts, float), np.shape(xs) if np.ndim(xs) else np.shape(ts))
    xs = np.broadcast_to(np.asarray(xs, float), ts.shape)
    out = {k: np.empty(ts.shape) for k in ("rho", "u", "pi", "err")}
    for i in np.ndindex(ts.shape):
        fs = fields(float(ts[i]), float(xs[i]), profile, sigma, cfg)
        out["rho"][i], out["u"][i], out["pi"][i], out["err"][i] = fs.rho, fs.u, fs.pi, fs.err_estimate
    return out


# --------------------------------------------------------------------------
# joint density
# --------------------------------------------------------------------------

def joint_density(t: float, x: float, u, profile: InitialProfile, sigma: SigmaPair,
                  cfg: QuadratureConfig | None = None):
    """P(t, x, u) with the u-exponent divisor 2 t sigma2^2 fixed by Var U.

    ``u`` may be an array; the s-domain is the union of the truncation sets
    of all requested velocities and each velocity keeps its own peak shift.
    """
    cfg = cfg or QuadratureConfig()
    if t <= 0:
        raise DomainError("joint density needs t > 0")
    if sigma.sigma2 <= 0:
        raise DomainError("joint density is degenerate for sigma2 = 0")
    scalar = np.ndim(u) == 0
    uu = np.atleast_1d(np.asarray(u, dtype=float))
    s1, s2 = sigma.sigma1 ** 2, sigma.sigma2 ** 2
    vq = t * (12 * s1 + s2 * t * t) / 12.0   # Var(X | U)
    vu = s2 * t
    log_c = -math.log(2.0 * math.pi * math.sqrt(vu * vq))

    pad = cfg.margin + math.sqrt(2.0 * cfg.exp_cutoff * vq)
    centers = x - 0.5 * t * uu
    lows, highs = zip(*(profile.preimage(0.5 * t, c, pad) for c in (centers.min(), centers.max())))
    lo, hi = min(lows), max(highs)
    width = min(math.sqrt(vq) / (1.0 + 0.5 * t * profile.du_max),
                math.sqrt(vu) / profile.du_max if profile.du_max > 0 else math.inf)
    grid = _scan_grid(lo, hi, width, cfg)

    u0g = profile.u0(grid)
    q = (u0g[None, :] + uu[:, None]) * (0.5 * t) + grid[None, :] - x
    sq = np.sign(q)
    iu, idx = np.nonzero(sq[:, :-1] * sq[:, 1:] < 0.0)
    if idx.size:
        ub = uu[iu]
        roots = bisect_roots(lambda z: (profile.u0(z) + ub) * (0.5 * t) + z - x,
                             grid[idx], grid[idx + 1], q[iu, idx])
    else:
        roots = np.empty(0)
    zeros = grid[np.any(q == 0.0, axis=0)]
    bps = np.array([b for b in profile.breakpoints if lo < b < hi], dtype=float)
    special = np.unique(np.concatenate([zeros, roots, bps]))
    nodes = np.unique(np.concatenate([grid, special]))

    def logw(s):
        u0s = profile.u0(s)
        qq = (u0s[None, :] + uu[:, None]) * (0.5 * t) + s[None, :] - x
        du = u0s[None, :] - uu[:, None]
        with np.errstate(divide="ignore"):
            return np.log(profile.rho0(s))[None, :] - du * du / (2 * vu) - qq * qq / (2 * vq)

    lw = logw(nodes)
    peak = lw.max(axis=1)
    live = np.isfinite(peak)
    out = np.zeros(uu.size)
    if live.any():
        shift = np.where(live, peak, 0.0)
        keep = np.any(lw >= (shift - cfg.exp_cutoff)[:, None], axis=0)
        runs = _panels_from_mask(nodes, keep, special)
        r = _integrate_runs(lambda s: np.exp(logw(s) - shift[:, None]), runs, cfg)
        out = np.where(live, np.exp(log_c + shift) * r.value, 0.0)
    return float(out[0]) if scalar else out


def velocity_window(t: float, x: float, profile: InitialProfile, sigma: SigmaPair,
                    cfg: QuadratureConfig | None = None) -> tuple[float, float]:
    """Velocity interval carrying all but ~exp(-exp_cutoff) of P(t, x, .)."""
    cfg = cfg or QuadratureConfig()
    ph = _positional_phase(t, x, profile, sigma, cfg)
    if not ph.runs:
        raise VacuumError(f"density vanishes at (t={t}, x={x})")
    s = ph.nodes[ph.keep]
    g = profile.u0(s) * t + s - x
    m = profile.u0(s) - ph.mom.gain * g
    spread = math.sqrt(2.0 * cfg.exp_cutoff * ph.mom.cond_var)
    lo, hi = float(m.min()), float(m.max())
    pad = 0.05 * (hi - lo) + spread + 1e-12
    return lo - pad, hi + pad


def velocity_moments(t: float, x: float, profile: InitialProfile, sigma: SigmaPair,
                     cfg: QuadratureConfig | None = None, panels: int = 16):
    """``(int P du, int u P du)`` by adaptive u-quadrature of the joint density.

    This route never touches the closed-form marginal; it is the independent
    check of the density and velocity formulas.
    """
    cfg = cfg or QuadratureConfig()
    lo, hi = velocity_window(t, x, profile, sigma, cfg)

    def f(u):
        p = joint_density(t, x, u, profile, sigma, cfg)
        return np.stack([p, u * p])

    r = integrate(f, np.linspace(lo, hi, panels + 1), cfg.rel_tol, cfg.abs_tol,
                  cfg.max_subdivisions)
    return float(r.value[0]), float(r.value[1])
