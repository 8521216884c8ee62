"""Acceptance criteria, one test per criterion.

Each test prints a PASS/FAIL line with the measured quantities; the lines
are also collected into a terminal summary section.
"""

import json
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from stochgas import (
    RiemannData,
    SigmaPair,
    analytic_profile,
    fields,
    limit_fields,
    make_riemann_profile,
    solve_compression,
)
from stochgas.balance import GridSpec, balance_residuals, conserved_totals, i_sigma_identity, relative_drift
from stochgas.cli import main
from stochgas.kernel import velocity_moments
from stochgas.montecarlo import compare_with_kernel, estimate_fields, sample_ensemble, z_summary
from stochgas.riemann import gamma_from_energy, gamma_limit_sweep, hugoniot_residuals

RIEMANN = RiemannData(1.0, 1.0, 0.0, -1.0)
BUMP_TANH = {"center": 0.5, "velocity": {"kind": "tanh-compression", "params": {"a": 1.0}}}


def report(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_criterion_1_marginalization():
    p = analytic_profile("tanh-compression", {"a": 1.0})
    sig = SigmaPair(0.3, 0.3)
    worst_rho = worst_mom = 0.0
    start = time.perf_counter()
    for t in np.linspace(0.25, 2.0, 5):
        for x in np.linspace(-3.0, 3.0, 20):
            m0, m1 = velocity_moments(float(t), float(x), p, sig)
            fs = fields(float(t), float(x), p, sig)
            worst_rho = max(worst_rho, abs(m0 - fs.rho) / fs.rho)
            worst_mom = max(worst_mom, abs(m1 - fs.rho * fs.u) / max(fs.rho * abs(fs.u), 1.0))
    elapsed = time.perf_counter() - start
    report(1, worst_rho <= 1e-6 and worst_mom <= 1e-6,
           f"max rel mass err {worst_rho:.2e}, max momentum err {worst_mom:.2e} "
           f"(tol 1e-6, {elapsed:.1f}s)")


def test_criterion_2_monte_carlo():
    p = make_riemann_profile(RIEMANN)
    sig = SigmaPair(0.05, 0.05)
    start = time.perf_counter()
    ens = sample_ensemble(p, sig, 1.0, 10 ** 6, seed=2024, window=(-5.0, 5.0), chunk_count=8)
    binned = estimate_fields(ens, np.linspace(-3.0, 2.0, 201))
    cmp = compare_with_kernel(binned, 1.0, p, sig)
    elapsed = time.perf_counter() - start
    zr, zu = z_summary(cmp["z_rho"]), z_summary(cmp["z_u"])
    ok = (zr["fraction_within"] >= 0.95 and zu["fraction_within"] >= 0.95
          and 0.7 <= zr["variance"] <= 1.3 and 0.7 <= zu["variance"] <= 1.3 and elapsed < 60)
    report(2, ok,
           f"density within 3se {zr['fraction_within']:.3f} var {zr['variance']:.3f}; "
           f"velocity within 3se {zu['fraction_within']:.3f} var {zu['variance']:.3f}; "
           f"{zr['bins']} occupied bins, {elapsed:.1f}s")


def test_criterion_3_smooth_limit():
    p = analytic_profile("tanh-compression", {"a": 1.0})
    t = 0.5
    xs = np.linspace(-2.0, 2.0, 11)
    u_bar = np.array([limit_fields(t, float(x), p)[1] for x in xs])
    errs = []
    for s in (0.1, 0.05, 0.025, 0.0125):
        u = np.array([fields(t, float(x), p, SigmaPair(s, s)).u for x in xs])
        errs.append(float(np.max(np.abs(u - u_bar))))
    ok = all(a > b for a, b in zip(errs, errs[1:])) and errs[-1] <= 1e-3
    report(3, ok, "max|u_sigma - u_bar| = " + ", ".join(f"{e:.2e}" for e in errs))


def test_criterion_4_riemann_middle_state():
    fs = fields(1.0, -0.5, make_riemann_profile(RIEMANN), SigmaPair(1e-2, 1e-2))
    ok = (abs(fs.rho / 3.0 - 1) <= 0.01 and abs(fs.u / (-2 / 3) - 1) <= 0.01
          and abs(fs.pi / (2 / 3) - 1) <= 0.01)
    report(4, ok, f"rho {fs.rho:.6f} (3), u {fs.u:.6f} (-2/3), pi {fs.pi:.6f} (2/3)")


def test_criterion_5_hugoniot():
    rng = np.random.default_rng(7)
    worst = worst_gamma = 0.0
    for _ in range(100):
        r1 = rng.uniform(0.1, 10.0)
        r2 = rng.uniform(-0.9 * r1, 10.0)
        u1 = rng.uniform(-3.0, 3.0)
        u2 = -rng.uniform(0.05, 5.0)
        fan = solve_compression(RiemannData(r1, r2, u1, u2))
        for lft, rgt, D in ((fan.left, fan.middle, fan.speed_left),
                            (fan.middle, fan.right, fan.speed_right)):
            r = hugoniot_residuals(lft, rgt, D)
            worst = max(worst, abs(r.r_mass), abs(r.r_momentum))
        g = gamma_from_energy(fan.left, fan.middle, fan.speed_left)
        worst_gamma = max(worst_gamma, abs(g - (3 * r1 + r2) / (r1 + r2)))
    report(5, worst <= 1e-12 and worst_gamma <= 1e-12,
           f"max mass/momentum residual {worst:.2e}, max left-shock gamma error {worst_gamma:.2e}")


def test_criterion_6_gamma_limit():
    rows = gamma_limit_sweep([1.0, 1e-1, 1e-2, 1e-3])
    dl = [r["dev_left"] for r in rows]
    dr = [r["dev_right"] for r in rows]
    mono = all(a > b for a, b in zip(dl, dl[1:])) and all(a > b for a, b in zip(dr, dr[1:]))
    report(6, mono and dl[-1] <= 0.01,
           "gamma_left " + ", ".join(f"{r['gamma_left']:.6f}" for r in rows)
           + "; gamma_right " + ", ".join(f"{r['gamma_right']:.6f}" for r in rows))


def test_criterion_7_balance_residuals():
    p = analytic_profile("gaussian-bump", BUMP_TANH)
    sig = SigmaPair(0.2, 0.2)
    grid = GridSpec(0.5, 1.0, 5, -3.0, 3.0, 11, 0.1)
    a = balance_residuals(p, sig, grid)
    b = balance_residuals(p, sig, grid.with_h(0.05))
    ratios = {k: a[k]["max"] / b[k]["max"] for k in ("continuity", "momentum")}
    ratios.update({k + "_l2": a[k]["l2"] / b[k]["l2"] for k in ("continuity", "momentum")})
    ts = np.linspace(0.5, 1.0, 20)
    xs = np.linspace(-3.0, 3.0, 20)[(np.arange(20) * 7) % 20]
    checks = [i_sigma_identity(float(t), float(x), p, sig) for t, x in zip(ts, xs)]
    within = sum(c["diff"] <= c["tolerance"] for c in checks)
    ok = all(3.5 <= r <= 4.5 for r in ratios.values()) and within == 20
    report(7, ok, "refinement ratios " + ", ".join(f"{k} {v:.3f}" for k, v in ratios.items())
           + f"; I_sigma identity {within}/20 within tolerance "
           f"(max diff {max(c['diff'] for c in checks):.1e})")


def test_criterion_8_conservation():
    p = analytic_profile("gaussian-bump", BUMP_TANH)
    tot = conserved_totals(p, SigmaPair(0.2, 0.2), (-10.0, 10.0), [0.0, 0.5, 1.0, 1.5, 2.0])
    dm, dp = relative_drift(tot["mass"]), relative_drift(tot["momentum"])
    report(8, dm <= 1e-6 and dp <= 1e-6,
           f"mass drift {dm:.2e}, momentum drift {dp:.2e} (initial momentum {tot['momentum'][0]:.4f})")


def test_criterion_9_determinism(tmp_path):
    runs = {
        "mc": (["mc", "--n", "200000", "--seed", "9", "--chunk-count", "4"],
               ["binned.csv", "comparison.csv", "summary.json", "config.json"]),
        "fields": (["fields", "--t", "0.5", "1", "--x", "-2", "1", "16"],
                   ["fields.csv", "summary.json", "config.json"]),
    }
    same = []
    for name, (args, files) in runs.items():
        a, b, c = (tmp_path / f"{name}_{k}" for k in "abc")
        assert main([*args, "--out-dir", str(a)]) == 0
        assert main([*args, "--out-dir", str(b)]) == 0
        assert main([name, "--config", str(a / "config.json"), "--out-dir", str(c)]) == 0
        same.append(all((a / f).read_bytes() == (b / f).read_bytes() == (c / f).read_bytes()
                        for f in files))
        json.loads((a / "summary.json").read_text())
    report(9, all(same), f"byte-identical reruns and config round trips: mc {same[0]}, fields {same[1]}")
