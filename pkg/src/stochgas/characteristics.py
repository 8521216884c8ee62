"""Burgers characteristics: breaking time, roots of u0(s) t + s - x, and the
free-particle (branch-sum) limit fields."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import DegenerateRootError, DomainError, ToleranceError, VacuumError
from .profiles import InitialProfile

ROOT_TOL = 1e-12
FOCAL_TOL = 1e-10


def bisect_roots(f, a, b, fa=None, iters: int = 60):
    """Vectorized bisection on brackets ``[a_i, b_i]`` with sign change.

    ``f`` is evaluated elementwise on arrays shaped like ``a``. Stops when all
    brackets are below a few ulps or after ``iters`` halvings.
    """
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    fa = f(a) if fa is None else np.array(fa, dtype=float)
    for _ in range(iters):
        m = 0.5 * (a + b)
        fm = f(m)
        left = np.sign(fm) == np.sign(fa)
        a = np.where(left, m, a)
        fa = np.where(left, fm, fa)
        b = np.where(left, b, m)
        if np.all(b - a <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(a))):
            break
    return 0.5 * (a + b)


def sign_change_brackets(s: np.ndarray, g: np.ndarray):
    """Exact zeros on the grid and index pairs bracketing a strict sign change."""
    zero = s[g == 0.0]
    sg = np.sign(g)  # signs, not products: products of tiny values underflow
    idx = np.nonzero(sg[:-1] * sg[1:] < 0.0)[0]
    return zero, idx


@dataclass(frozen=True)
class ScanConfig:
    """Root scan: grid of ``resolution`` x window width, window padded by ``margin``."""

    resolution: float = 1e-3
    margin: float = 1.0
    root_tol: float = ROOT_TOL
    focal_tol: float = FOCAL_TOL

    def to_dict(self) -> dict:
        return {"resolution": self.resolution, "margin": self.margin,
                "root_tol": self.root_tol, "focal_tol": self.focal_tol}


@dataclass(frozen=True)
class BreakingTime:
    t_star: float
    s_star: float | None = None


@dataclass(frozen=True)
class CharacteristicRoots:
    t: float
    x: float
    roots: np.ndarray
    jac: np.ndarray
    weights: np.ndarray = field(repr=False)

    @property
    def count(self) -> int:
        return int(self.roots.size)


def _require_c1(profile: InitialProfile):
    if not profile.is_c1:
        raise DomainError(f"profile of kind {profile.kind!r} is not C1; mollify it first")


def breaking_time(profile: InitialProfile, window=None, n_grid: int = 20001) -> BreakingTime:
    """``1 / max(-u0')`` searched on ``window`` (default ``profile.window``)."""
    _require_c1(profile)
    lo, hi = window if window is not None else profile.window
    s = np.linspace(lo, hi, n_grid)
    neg = -profile.u0_prime(s)
    i = int(np.argmax(neg))
    best_s, best = s[i], neg[i]
    if best <= 0.0:
        return BreakingTime(math.inf, None)
    h = s[1] - s[0]
    a, b = max(lo, best_s - h), min(hi, best_s + h)
    res = optimize.minimize_scalar(lambda z: float(profile.u0_prime(np.array(z))),
                                   bounds=(a, b), method="bounded",
                                   options={"xatol": 1e-12})
    if -res.fun > best:
        best_s, best = float(res.x), float(-res.fun)
    return BreakingTime(1.0 / best, float(best_s))


def scan_window(t: float, x: float, profile: InitialProfile, margin: float):
    return profile.preimage(t, x, margin)


def characteristic_roots(t: float, x: float, profile: InitialProfile,
                         scan: ScanConfig | None = None) -> CharacteristicRoots:
    """All simple roots of ``g(s) = u0(s) t + s - x`` on the scan window.

    Roots are bracketed by sign changes on a grid, bisected and then
    polished with Newton steps. Root pairs closer than the grid spacing are
    not resolved.
    """
    scan = scan or ScanConfig()
    _require_c1(profile)
    if t < 0:
        raise DomainError("t must be nonnegative")
    if t == 0:
        s = np.array([float(x)])
        jac = np.ones(1)
        return CharacteristicRoots(t, x, s, jac, np.asarray(profile.rho0(s), float))

    lo, hi = scan_window(t, x, profile, scan.margin)
    n = int(math.ceil(1.0 / scan.resolution)) + 1
    s = np.linspace(lo, hi, n)

    def g(z):
        return profile.u0(z) * t + z - x

    gs = g(s)
    zeros, idx = sign_change_brackets(s, gs)
    roots = bisect_roots(g, s[idx], s[idx + 1], gs[idx])
    roots = np.sort(np.concatenate([zeros, roots]))
    for _ in range(3):
        jac = 1.0 + t * profile.u0_prime(roots)
        step = np.where(jac != 0.0, g(roots) / np.where(jac != 0.0, jac, 1.0), 0.0)
        roots = roots - step
    resid = np.abs(g(roots))
    scale = np.maximum(1.0, np.abs(x))
    if np.any(resid > scan.root_tol * scale):
        raise ToleranceError("characteristic root polish failed",
                             achieved=float(resid.max()))
    jac = 1.0 + t * profile.u0_prime(roots)
    if np.any(np.abs(jac) < scan.focal_tol):
        raise DegenerateRootError(f"focal point at t={t}, x={x}")
    weights = np.asarray(profile.rho0(roots), float) / np.abs(jac)
    return CharacteristicRoots(t, x, roots, jac, weights)


def limit_fields(t: float, x: float, profile: InitialProfile,
                 scan: ScanConfig | None = None) -> tuple[float, float]:
    """Free-particle fields: mass-weighted sums over characteristic branches."""
    rho, u, _ = limit_fields_with_count(t, x, profile, scan)
    return rho, u


def limit_fields_with_count(t, x, profile, scan=None) -> tuple[float, float, int]:
    cr = characteristic_roots(t, x, profile, scan)
    total = float(cr.weights.sum())
    if cr.count == 0 or total <= 0.0:
        raise VacuumError(f"no mass reaches (t={t}, x={x})")
    return total, float(np.dot(cr.weights, profile.u0(cr.roots)) / total), cr.count
