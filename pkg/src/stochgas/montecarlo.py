"""Direct simulation of the perturbed particle system.

The SDE is linear with additive noise, so (X_t, U_t) given the start s is
sampled exactly from its Gaussian law; there is no time stepping. Starting
points follow rho0 restricted to a window, drawn by inverse CDF.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError
from .kernel import FieldSample, SigmaPair, fields, transition_moments
from .profiles import InitialProfile
from .quadrature import QuadratureConfig

CDF_NODES = 2 ** 14


def inverse_cdf_table(profile: InitialProfile, window, n_nodes: int = CDF_NODES):
    """Tabulated cumulative mass of rho0 on ``window`` (Simpson per cell).

    Returns ``(cdf, nodes, mass)`` with ``cdf`` normalized and strictly
    increasing, ready for ``np.interp``. Linear interpolation between nodes
    biases draws only below the cell width.
    """
    lo, hi = window
    if not hi > lo:
        raise ConfigError("sampling window must have positive length")
    s = np.linspace(lo, hi, n_nodes)
    mid = 0.5 * (s[:-1] + s[1:])
    r = profile.rho0
    cells = (s[1] - s[0]) / 6.0 * (r(s[:-1]) + 4.0 * r(mid) + r(s[1:]))
    if np.any(cells < 0):
        raise ConfigError("rho0 must be nonnegative")
    cum = np.concatenate([[0.0], np.cumsum(cells)])
    mass = float(cum[-1])
    if not (mass > 0 and np.isfinite(mass)):
        raise DomainError("rho0 has no mass on the sampling window")
    cdf = cum / mass
    strict = np.concatenate([[True], np.diff(cdf) > 0])
    return cdf[strict], s[strict], mass


def chunk_bounds(n: int, chunk_count: int) -> np.ndarray:
    sizes = np.full(chunk_count, n // chunk_count)
    sizes[: n % chunk_count] += 1
    return np.concatenate([[0], np.cumsum(sizes)])


@dataclass(frozen=True)
class ParticleEnsemble:
    t: float
    particles: np.ndarray = field(repr=False)  # columns: s, x, u
    window: tuple
    n: int
    seed: int
    chunk_count: int
    window_mass: float

    @property
    def s(self):
        return self.particles[:, 0]

    @property
    def x(self):
        return self.particles[:, 1]

    @property
    def u(self):
        return self.particles[:, 2]

    @property
    def bounds(self) -> np.ndarray:
        return chunk_bounds(self.n, self.chunk_count)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("s,x,u\n")
            np.savetxt(fh, self.particles, fmt="%.17g", delimiter=",")


def _cholesky(t: float, sigma: SigmaPair):
    m = transition_moments(t, sigma)
    l00 = np.sqrt(m.var_x)
    l10 = m.cov / l00 if l00 > 0 else 0.0
    l11 = np.sqrt(max(m.var_u - l10 * l10, 0.0))
    return l00, l10, l11


def sample_ensemble(profile: InitialProfile, sigma: SigmaPair, t: float, n: int, seed: int,
                    window, chunk_count: int = 1, workers: int = 1) -> ParticleEnsemble:
    """Draw ``n`` particles at time ``t``.

    Chunk ``i`` uses the ``i``-th child of ``SeedSequence(seed)`` and a fixed
    slice of the output, so the ensemble depends only on
    ``(seed, chunk_count, n)`` and not on ``workers``.
    """
    if t < 0:
        raise DomainError("t must be nonnegative")
    if n <= 0 or chunk_count <= 0:
        raise ConfigError("n and chunk_count must be positive")
    window = (float(window[0]), float(window[1]))
    cdf, nodes, mass = inverse_cdf_table(profile, window)
    l00, l10, l11 = _cholesky(t, sigma)
    bounds = chunk_bounds(n, chunk_count)
    children = np.random.SeedSequence(seed).spawn(chunk_count)
    out = np.empty((n, 3))

    def run(i):
        rng = np.random.default_rng(children[i])
        m = bounds[i + 1] - bounds[i]
        s = np.interp(rng.random(m), cdf, nodes)
        z = rng.standard_normal((2, m))
        u0 = profile.u0(s)
        sl = slice(bounds[i], bounds[i + 1])
        out[sl, 0] = s
        out[sl, 1] = s + u0 * t + l00 * z[0]
        out[sl, 2] = u0 + l10 * z[0] + l11 * z[1]

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(run, range(chunk_count)))
    else:
        for i in range(chunk_count):
            run(i)
    return ParticleEnsemble(t, out, window, n, int(seed), chunk_count, mass)


@dataclass
class BinnedFields:
    edges: np.ndarray
    count: np.ndarray
    density: np.ndarray
    density_se: np.ndarray
    mean_u: np.ndarray
    mean_u_se: np.ndarray
    var_u: np.ndarray
    var_u_se: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def occupied(self) -> np.ndarray:
        return self.count >= 2

    def columns(self) -> dict:
        return {"x_lo": self.edges[:-1], "x_hi": self.edges[1:], "x": self.centers,
                "count": self.count, "density": self.density, "density_se": self.density_se,
                "mean_u": self.mean_u, "mean_u_se": self.mean_u_se,
                "var_u": self.var_u, "var_u_se": self.var_u_se}


def estimate_fields(ens: ParticleEnsemble, bins) -> BinnedFields:
    """Per-bin density, mean velocity and velocity variance with standard errors.

    Per-chunk partial sums are reduced in chunk order (two passes: counts and
    sums, then central moments about the pooled bin mean).
    """
    edges = np.asarray(bins, dtype=float)
    nb = edges.size - 1
    if ens.n == 0:
        raise ConfigError("empty ensemble")
    bounds = ens.bounds
    idx_all = np.searchsorted(edges, ens.x, side="right") - 1
    inside = (idx_all >= 0) & (idx_all < nb)

    count = np.zeros(nb)
    s1 = np.zeros(nb)
    for i in range(ens.chunk_count):
        sl = slice(bounds[i], bounds[i + 1])
        ix, ok = idx_all[sl], inside[sl]
        count += np.bincount(ix[ok], minlength=nb)
        s1 += np.bincount(ix[ok], weights=ens.u[sl][ok], minlength=nb)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.where(count > 0, s1 / count, np.nan)

    c2 = np.zeros(nb)
    c4 = np.zeros(nb)
    for i in range(ens.chunk_count):
        sl = slice(bounds[i], bounds[i + 1])
        ix, ok = idx_all[sl], inside[sl]
        d = ens.u[sl][ok] - mean[ix[ok]]
        c2 += np.bincount(ix[ok], weights=d * d, minlength=nb)
        c4 += np.bincount(ix[ok], weights=d ** 4, minlength=nb)

    width = np.diff(edges)
    n = float(ens.n)
    density = count / (n * width) * ens.window_mass
    density_se = np.sqrt(count * (1.0 - count / n)) / (n * width) * ens.window_mass
    with np.errstate(invalid="ignore", divide="ignore"):
        var = np.where(count > 0, c2 / count, np.nan)
        var_unbiased = np.where(count > 1, c2 / (count - 1), np.nan)
        mean_se = np.sqrt(var_unbiased / count)
        m4 = np.where(count > 0, c4 / count, np.nan)
        var_se = np.sqrt(np.maximum(m4 - var * var, 0.0) / count)
    return BinnedFields(edges, count.astype(np.int64), density, density_se,
                        mean, mean_se, var, var_se)


_GL4 = np.polynomial.legendre.leggauss(4)


def bin_averaged_fields(edges, t: float, profile: InitialProfile, sigma: SigmaPair,
                        cfg: QuadratureConfig | None = None) -> dict:
    """Closed-form counterparts of the binned estimators.

    Averages over each bin with 4-point Gauss-Legendre: density is the bin
    mean of rho, velocity the mass-weighted mean of u, and the variance adds
    the spread of u across the bin to the spurious pressure.
    """
    edges = np.asarray(edges, dtype=float)
    xg, wg = _GL4
    rho = np.empty(edges.size - 1)
    u = np.empty_like(rho)
    var = np.empty_like(rho)
    for k, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        pts = 0.5 * (a + b) + 0.5 * (b - a) * xg
        fs: list[FieldSample] = [fields(t, float(p), profile, sigma, cfg) for p in pts]
        r = np.array([f.rho for f in fs])
        v = np.array([f.u for f in fs])
        p = np.array([f.pi for f in fs])
        mass = 0.5 * wg @ r
        rho[k] = mass
        u[k] = (0.5 * wg @ (r * v)) / mass
        var[k] = (0.5 * wg @ (p + r * v * v)) / mass - u[k] ** 2
    return {"rho": rho, "u": u, "var": var}


def compare_with_kernel(binned: BinnedFields, t: float, profile: InitialProfile,
                        sigma: SigmaPair, cfg: QuadratureConfig | None = None) -> dict:
    """z-scores of the Monte Carlo bins against the closed-form bin averages."""
    closed = bin_averaged_fields(binned.edges, t, profile, sigma, cfg)
    occ = binned.occupied
    with np.errstate(invalid="ignore", divide="ignore"):
        z_rho = np.where(occ, (binned.density - closed["rho"]) / binned.density_se, np.nan)
        z_u = np.where(occ, (binned.mean_u - closed["u"]) / binned.mean_u_se, np.nan)
        z_var = np.where(occ, (binned.var_u - closed["var"]) / binned.var_u_se, np.nan)
    return {
        "x": binned.centers, "count": binned.count,
        "rho_closed": closed["rho"], "rho_mc": binned.density, "rho_se": binned.density_se,
        "z_rho": z_rho,
        "u_closed": closed["u"], "u_mc": binned.mean_u, "u_se": binned.mean_u_se, "z_u": z_u,
        "var_closed": closed["var"], "var_mc": binned.var_u, "var_se": binned.var_u_se,
        "z_var": z_var,
    }


def z_summary(z: np.ndarray, limit: float = 3.0) -> dict:
    z = np.asarray(z, float)
    z = z[np.isfinite(z)]
    return {"bins": int(z.size),
            "fraction_within": float(np.mean(np.abs(z) <= limit)) if z.size else float("nan"),
            "variance": float(np.mean(z * z)) if z.size else float("nan")}
