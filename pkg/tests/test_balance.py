import json

import numpy as np
import pytest

from stochgas import ConfigError, QuadratureConfig, SigmaPair, WindowError, analytic_profile
from stochgas.balance import (
    GridSpec,
    balance_residuals,
    conserved_totals,
    i_sigma_identity,
    integral_term_decay,
    relative_drift,
    residual_continuity,
    residual_momentum,
    residual_report,
)

BUMP_TANH = {"center": 0.5, "velocity": {"kind": "tanh-compression", "params": {"a": 1.0}}}


@pytest.fixture(scope="module")
def bump_tanh():
    return analytic_profile("gaussian-bump", BUMP_TANH)


def test_grid_validation():
    with pytest.raises(ConfigError):
        GridSpec(0.05, 1.0, 3, -1, 1, 3, 0.1)
    with pytest.raises(ConfigError):
        GridSpec(0.5, 1.0, 0, -1, 1, 3, 0.1)
    g = GridSpec(0.5, 1.0, 3, -1, 1, 5, 0.1)
    assert g.with_h(0.05).h == 0.05
    np.testing.assert_array_equal(g.with_h(0.05).x_nodes, g.x_nodes)


def test_constant_data_zero_residual():
    p = analytic_profile("constant", {"rho": 1.2, "u": 0.3})
    grid = GridSpec(0.5, 1.0, 2, -1.0, 1.0, 3, 0.05)
    res = balance_residuals(p, SigmaPair(0.2, 0.2), grid)
    bound = res["quadrature_budget"] + 1e-12 / grid.h ** 2
    assert res["continuity"]["max"] <= bound
    assert res["momentum"]["max"] <= bound


def test_second_order_refinement(bump_tanh):
    sig = SigmaPair(0.1, 0.1)
    grid = GridSpec(0.5, 1.0, 3, -2.0, 2.0, 5, 0.1)
    a, b = balance_residuals(bump_tanh, sig, grid), balance_residuals(bump_tanh, sig, grid.with_h(0.05))
    for k in ("continuity", "momentum"):
        assert 3.5 <= a[k]["max"] / b[k]["max"] <= 4.5
        assert 3.5 <= a[k]["l2"] / b[k]["l2"] <= 4.5


def test_residual_within_budget_at_small_h(bump_tanh):
    sig = SigmaPair(0.1, 0.1)
    cfg = QuadratureConfig(rel_tol=1e-12, abs_tol=1e-14)
    coarse = GridSpec(0.7, 0.7, 1, -0.5, 0.5, 3, 0.05)
    c_cont = residual_continuity(bump_tanh, sig, coarse, cfg)
    c_mom = residual_momentum(bump_tanh, sig, coarse, cfg)
    h = 5e-3
    fine_cont = residual_continuity(bump_tanh, sig, coarse.with_h(h), cfg)
    fine_mom = residual_momentum(bump_tanh, sig, coarse.with_h(h), cfg)
    for c, f in ((c_cont, fine_cont), (c_mom, fine_mom)):
        trunc = c["max"] * (h / coarse.h) ** 2
        assert f["max"] <= 10 * (trunc + f["quadrature_budget"])


def test_i_sigma_constant_vanishes():
    p = analytic_profile("constant", {"rho": 1.0, "u": 0.2})
    out = i_sigma_identity(1.0, 0.0, p, SigmaPair(0.3, 0.3))
    assert abs(out["direct"]) <= out["tolerance"]
    assert abs(out["grad_pi"]) <= out["tolerance"]


def test_i_sigma_riemann(riemann_1101):
    out = i_sigma_identity(1.0, -0.5, riemann_1101, SigmaPair(0.1, 0.1))
    assert out["diff"] <= out["tolerance"]


def test_i_sigma_reflection(tanh_profile):
    sig = SigmaPair(0.2, 0.2)
    a = i_sigma_identity(0.8, 0.4, tanh_profile, sig)
    b = i_sigma_identity(0.8, -0.4, tanh_profile, sig)
    assert a["diff"] <= a["tolerance"]
    assert b["direct"] == pytest.approx(-a["direct"], abs=a["tolerance"])


def test_mass_conserved_bump_at_rest():
    p = analytic_profile("gaussian-bump", {"width": 0.8})
    tot = conserved_totals(p, SigmaPair(0.2, 0.2), (-10, 10), [0, 1, 2])
    assert relative_drift(tot["mass"]) <= 1e-6


def test_momentum_per_mass_is_boost():
    c = 0.35
    p = analytic_profile("gaussian-bump", {"width": 0.8,
                                           "velocity": {"kind": "constant", "params": {"c": c}}})
    tot = conserved_totals(p, SigmaPair(0.2, 0.2), (-10, 10), [0, 0.5, 1.0])
    np.testing.assert_allclose(np.array(tot["momentum"]) / np.array(tot["mass"]), c, rtol=1e-9)


def test_momentum_conserved_compression(bump_tanh):
    tot = conserved_totals(bump_tanh, SigmaPair(0.2, 0.2), (-10, 10), [0, 1, 2])
    assert tot["momentum"][0] != 0
    assert relative_drift(tot["momentum"]) <= 1e-6


def test_window_too_small():
    p = analytic_profile("gaussian-bump", {"width": 1.0})
    with pytest.raises(WindowError):
        conserved_totals(p, SigmaPair(0.2, 0.2), (-2, 2), [0])


def test_report_serializes(bump_tanh):
    grid = GridSpec(0.5, 0.6, 2, -1.0, 1.0, 3, 0.05)
    rep = residual_report(bump_tanh, SigmaPair(0.2, 0.2), grid, i_sigma_points=[(0.55, 0.2)])
    d = json.loads(rep.to_json())
    assert d["refinement"]["h_fine"] == 0.025
    assert d["i_sigma_check"]["all_within_tolerance"]
    assert d["budgets"]["truncation_order"] == 2


def test_integral_term_decays_for_smooth_limit(tanh_profile):
    out = integral_term_decay(tanh_profile, 0.5, np.linspace(-2, 2, 5), [0.1, 0.05, 0.025])
    peaks = out["max_abs_i_sigma"]
    assert peaks[0] > peaks[1] > peaks[2]
    assert np.isfinite(out["observed_rate"])
