"""The ODE oracle against frozen traces and against its own defining equations."""

import numpy as np
import pytest

from discflux.data import get_example
from discflux.errors import ParameterError, UnsupportedFluxError
from discflux.flux import MollifiedFlux, get_fixture, mollify
from discflux.grid import Grid
from discflux.ode_oracle import PiecewiseConstant, ode_oracle, oracle_profile


def profile(name):
    e = get_example(name)
    return oracle_profile(e.w, get_fixture(e.flux), e.lam, -5.0, 5.0), e


def test_piecewise_constant_checks():
    with pytest.raises(ParameterError):
        PiecewiseConstant((0.0, 1.0), (0.0, 1.0))
    with pytest.raises(ParameterError):
        PiecewiseConstant((1.0, 0.0), (0.0, 1.0, 0.0))
    w = PiecewiseConstant((-1.0, 1.0), (0.5, 1.0, 0.5))
    g = Grid(-2.0, 2.0, 4)
    assert list(w.sample(g).values) == [0.5, 1.0, 1.0, 0.5]
    assert list(w.sample(g, far_field=False).values) == [0.0, 1.0, 1.0, 0.0]


@pytest.mark.parametrize("name", ["case1", "case2"])
def test_continuous_cases_have_no_jumps(name):
    p, _ = profile(name)
    assert p.jumps == []


def test_case3_frozen_shock():
    p, _ = profile("case3")
    (j,) = p.jumps
    assert j.x == pytest.approx(-0.132745, abs=1e-5)
    assert j.u_minus == pytest.approx(0.252898, abs=1e-5)
    assert j.u_plus == pytest.approx(0.747102, abs=1e-5)
    assert j.u_plus == pytest.approx(1 - j.u_minus, abs=1e-9)


def test_ex72_frozen_jumps():
    p, e = profile("ex72")
    f = get_fixture(e.flux)
    iface, shock = p.jumps
    assert iface.x == 0.0
    assert iface.u_minus == pytest.approx(0.4, abs=1e-5)
    assert iface.u_plus == pytest.approx(0.139445, abs=1e-5)
    assert f.f_l(iface.u_minus) == pytest.approx(f.f_r(iface.u_plus), abs=1e-8)
    assert shock.x == pytest.approx(0.196381, abs=1e-5)
    assert shock.u_minus == pytest.approx(0.310394, abs=1e-5)
    assert shock.u_plus == pytest.approx(0.689606, abs=1e-5)


@pytest.mark.parametrize("name", ["case1", "case2", "case3", "ex72"])
def test_profile_solves_the_stationary_equation(name):
    # u + lam f(x, u)_x = w on every smooth stretch, by finite differences
    p, e = profile(name)
    f = get_fixture(e.flux)
    cuts = [j.x for j in p.jumps] + list(e.w.breaks) + [0.0]
    x = np.linspace(-4.0, 4.0, 8001)
    x = x[np.min(np.abs(x[:, None] - np.array(cuts)[None, :]), axis=1) > 0.01]
    d = 1e-5
    fx = lambda s: np.where(s <= 0, f.f_l(np.vectorize(p.value)(s)), f.f_r(np.vectorize(p.value)(s)))
    u = np.vectorize(p.value)(x)
    res = u + e.lam * (fx(x + d) - fx(x - d)) / (2 * d) - e.w(x)
    assert np.max(np.abs(res)) <= 1e-4


@pytest.mark.parametrize("name", ["case3", "ex72"])
def test_flux_is_continuous_across_jumps(name):
    p, e = profile(name)
    f = get_fixture(e.flux)
    for j in p.jumps:
        fm = f.f_l(j.u_minus) if j.x <= 0 else f.f_r(j.u_minus)
        fp = f.f_r(j.u_plus) if j.x >= 0 else f.f_l(j.u_plus)
        assert fm == pytest.approx(fp, abs=1e-8)


def test_far_field_is_approached():
    p, _ = profile("case1")
    assert p.value(-4.9) == pytest.approx(0.5, abs=1e-3)
    assert p.value(4.9) == pytest.approx(0.5, abs=1e-3)


def test_sampling_on_grid():
    e = get_example("case2")
    g = Grid.from_spacing(-3.0, 3.0, 0.01)
    u = ode_oracle(e.w, get_fixture(e.flux), e.lam, g)
    assert u.values.min() >= 0.0 and u.values.max() <= 1.0


def test_non_polynomial_flux_is_rejected():
    m = mollify(get_fixture("burgers_shifted"), 0.1)
    assert isinstance(m, MollifiedFlux)
    with pytest.raises(UnsupportedFluxError):
        oracle_profile(get_example("case1").w, m, 0.5, -1.0, 1.0)
