import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate as sp_integrate

from stochgas import (
    ConfigError,
    ConstraintError,
    MollifierConfig,
    RiemannData,
    analytic_profile,
    make_riemann_profile,
    mollify,
    profile_from_spec,
)
from stochgas.profiles import PROFILE_NAMES, bump_cdf, bump_kernel


def test_riemann_profile_values(riemann_1101):
    p = riemann_1101
    assert p.rho0(-5.0) == 1.0
    assert p.rho0(5.0) == 2.0
    assert p.u0(5.0) == -1.0
    # right-value convention at the jump
    assert p.u0(0.0) == -1.0
    assert p.rho0(0.0) == 2.0
    assert not p.is_c1


def test_zero_jump_is_constant():
    p = make_riemann_profile(RiemannData(1.0, 0.0, 0.7, 0.0))
    s = np.linspace(-3, 3, 13)
    np.testing.assert_array_equal(p.rho0(s), 1.0)
    np.testing.assert_array_equal(p.u0(s), 0.7)


@pytest.mark.parametrize("bad", [(0.0, 1.0), (-1.0, 3.0), (1.0, -1.0), (1.0, -2.0)])
def test_riemann_density_constraints(bad):
    with pytest.raises(ConstraintError):
        RiemannData(bad[0], bad[1], 0.0, -1.0)


def test_constraint_error_is_config_error():
    with pytest.raises(ConfigError):
        RiemannData(0.0, 1.0, 0.0, 0.0)


def test_registry_examples():
    c = analytic_profile("constant", {"rho": 1.0, "u": 0.4})
    s = np.linspace(-4, 4, 9)
    np.testing.assert_array_equal(c.rho0(s), 1.0)
    np.testing.assert_array_equal(c.u0(s), 0.4)

    th = analytic_profile("tanh-compression", {"a": 1.0})
    np.testing.assert_allclose(th.u0(s), -np.tanh(s), rtol=0, atol=1e-15)
    assert th.u0_prime(0.0) == pytest.approx(-1.0)

    a = 0.7
    lr = analytic_profile("linear-ramp", {"a": a})
    np.testing.assert_allclose(lr.u0(s), -a * s)
    np.testing.assert_allclose(lr.u0_prime(s), -a)


def test_unknown_name():
    with pytest.raises(ConfigError):
        analytic_profile("parabola")
    with pytest.raises(ConfigError):
        profile_from_spec({"kind": "parabola"})


@pytest.mark.parametrize("name", [n for n in PROFILE_NAMES if n != "constant"])
def test_derivative_second_order(name):
    p = analytic_profile(name)
    s = np.linspace(-2.3, 2.1, 9)
    errs = []
    for h in (1e-2, 5e-3):
        fd = (p.u0(s + h) - p.u0(s - h)) / (2 * h)
        errs.append(np.max(np.abs(fd - p.u0_prime(s))))
    if errs[0] > 1e-12:
        assert 3.5 < errs[0] / errs[1] < 4.5


def test_spec_round_trip():
    p = analytic_profile("gaussian-bump", {"center": 0.5,
                                           "velocity": {"kind": "tanh-compression",
                                                        "params": {"a": 1.0}}})
    q = profile_from_spec(p.spec)
    s = np.linspace(-3, 3, 7)
    np.testing.assert_array_equal(p.rho0(s), q.rho0(s))
    np.testing.assert_array_equal(p.u0(s), q.u0(s))
    assert p.window == (-9.5, 10.5)


def test_bump_kernel_unit_mass():
    mass, _ = sp_integrate.quad(bump_kernel, -1, 1, epsabs=1e-14, epsrel=1e-13)
    assert mass == pytest.approx(1.0, abs=1e-12)
    assert bump_cdf(0.0) == 0.5
    assert bump_cdf(1.0) == 1.0 and bump_cdf(-1.0) == 0.0


def test_bump_cdf_matches_quadrature():
    for z in (-0.7, -0.2, 0.1, 0.55, 0.93):
        ref, _ = sp_integrate.quad(bump_kernel, -1, z, epsabs=1e-15, epsrel=1e-13)
        assert float(bump_cdf(z)) == pytest.approx(ref, abs=1e-10)


@given(eps=st.floats(1e-3, 0.5))
def test_mollified_constant_unchanged(eps):
    p = mollify(analytic_profile("constant", {"rho": 1.3, "u": -0.2}), MollifierConfig(eps))
    s = np.linspace(-2, 2, 5)
    np.testing.assert_allclose(p.rho0(s), 1.3, rtol=1e-12)
    np.testing.assert_allclose(p.u0(s), -0.2, rtol=1e-12)


@given(eps=st.floats(1e-4, 0.5))
def test_mollified_step(eps):
    base = make_riemann_profile(RiemannData(1.0, 1.0, 0.0, -1.0))
    p = mollify(base, MollifierConfig(eps))
    assert float(p.rho0(0.0)) == pytest.approx(1.5, abs=1e-14)
    assert float(p.u0(0.0)) == pytest.approx(-0.5, abs=1e-14)
    assert float(p.rho0(2 * eps)) == 2.0
    assert float(p.u0(-2 * eps)) == 0.0
    # exact outside the smoothing layer
    s = np.concatenate([np.linspace(-3, -eps, 50), np.linspace(eps, 3, 50)])
    assert np.max(np.abs(p.rho0(s) - base.rho0(s))) == 0.0
    assert p.is_c1


def test_mollified_step_derivative_is_scaled_kernel():
    eps = 0.1
    p = mollify(make_riemann_profile(RiemannData(1.0, 1.0, 0.0, -1.0)), MollifierConfig(eps))
    s = np.linspace(-0.09, 0.09, 7)
    np.testing.assert_allclose(p.u0_prime(s), -MollifierConfig(eps).kernel(s), rtol=1e-12)


def test_mollified_smooth_close_to_base():
    base = analytic_profile("tanh-compression")
    p = mollify(base, MollifierConfig(1e-2))
    s = np.linspace(-2, 2, 9)
    # second-moment error of an even kernel: O(eps^2 * |u''|)
    assert np.max(np.abs(p.u0(s) - base.u0(s))) < 1e-4


def test_mollify_config_validates():
    with pytest.raises(ConfigError):
        MollifierConfig(0.0)
