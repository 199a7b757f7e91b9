import numpy as np
import pytest
from hypothesis import given, strategies as st

from discflux import flux as fx
from discflux.errors import ParameterError, UnsupportedFluxError
from discflux.flux import Flux, builtin_fixtures, get_fixture, mollify, smoothstep, validate


def test_eval_switches_at_origin():
    f = get_fixture("traffic_jump")
    assert fx.eval(f, -0.1, 0.5) == pytest.approx(0.25)
    assert fx.eval(f, 0.0, 0.5) == pytest.approx(0.25)
    assert fx.eval(f, 0.1, 0.5) == pytest.approx(0.5)


@given(st.floats(-10, 10), st.floats(0, 1))
def test_eval_uses_left_flux_on_closed_left_half(x, w):
    f = get_fixture("burgers_shifted")
    want = f.f_l(w) if x <= 0 else f.f_r(w)
    assert fx.eval(f, x, w) == want


def test_fixture_lipschitz_constants_are_exact():
    L = {f.name: f.L for f in builtin_fixtures()}
    assert L == {"burgers_shifted": 1.0, "traffic": 1.0, "traffic_jump": 2.0, "traffic_84": 8.0}


@pytest.mark.parametrize("name", ["traffic", "traffic_jump", "traffic_84"])
def test_fixtures_pass_validation(name):
    assert validate(get_fixture(name)).passed


def test_burgers_pair_fails_the_endpoint_clauses():
    rep = validate(get_fixture("burgers_shifted"))
    assert rep.clause("lipschitz_l").passed and rep.clause("lipschitz_r").passed
    assert rep.clause("match_at_1").worst == pytest.approx(0.5)
    assert rep.clause("zero_at_0").worst == pytest.approx(0.5)
    assert not get_fixture("burgers_shifted").is_f1


def test_underestimated_lipschitz_is_reported():
    rep = validate(get_fixture("traffic_84").with_lipschitz(4.0))
    assert not rep.passed
    c = rep.clause("lipschitz_l")
    assert not c.passed and c.worst == pytest.approx(8.0, rel=1e-2)
    assert rep.clause("lipschitz_r").passed


def test_polynomial_flux_derivatives():
    f = Flux.polynomial([0, 1, -1], [0, 3, -3])
    assert f.L == pytest.approx(3.0)
    assert f.df_r(0.25) == pytest.approx(1.5)


def test_unknown_fixture():
    with pytest.raises(UnsupportedFluxError):
        get_fixture("nope")


def test_mollified_flux_matches_pair_outside_layer():
    base = get_fixture("burgers_shifted")
    m = mollify(base, 0.1)
    w = np.linspace(0, 1, 11)
    assert np.allclose(m.eval(-0.2, w), base.f_l(w))
    assert np.allclose(m.eval(0.2, w), base.f_r(w))
    assert np.allclose(m.eval(0.05, m.stationary_state(0.05)), 0.0)
    with pytest.raises(ParameterError):
        mollify(base, 0.0)
    with pytest.raises(UnsupportedFluxError):
        mollify(get_fixture("traffic"), 0.1)


@given(st.floats(-1, 1), st.floats(0.01, 1))
def test_smoothstep_is_monotone_in_unit_interval(x, d):
    s0, s1 = smoothstep(x, d), smoothstep(x + 1e-3, d)
    assert 0 <= s0 <= s1 <= 1
