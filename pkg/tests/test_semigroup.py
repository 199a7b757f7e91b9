import numpy as np
import pytest
from hypothesis import given, settings

from conftest import piecewise, smooth_bump
from discflux.errors import ContinuationNonConvergenceError, NonConvergenceError, ParameterError
from discflux.flux import get_fixture
from discflux.grid import Grid, GridFunction, l1_distance
from discflux.inviscid import ContinuationParams
from discflux.semigroup import (
    EvolutionParams,
    cl_convergence_sweep,
    evolve,
    viscosity_semigroup_sweep,
)
from discflux.viscous import ResolventParams, resolvent

TRAFFIC = get_fixture("traffic")
JUMP = get_fixture("traffic_jump")
BURGERS = get_fixture("burgers_shifted")


def test_params_validation():
    with pytest.raises(ParameterError):
        EvolutionParams(1.0, 10, "viscous")
    with pytest.raises(ParameterError):
        EvolutionParams(1.0, None, "inviscid")
    with pytest.raises(ParameterError):
        EvolutionParams(1.0, 10, "viscous", 0.1, snapshot_times=[0.5, 0.2])
    with pytest.raises(ParameterError):
        EvolutionParams(1.0, 10, "viscous", 0.1, snapshot_times=[2.0])
    assert EvolutionParams(1.0, None, "viscous", 0.1).steps(JUMP) == 80
    assert EvolutionParams.parse_mode("viscous:0.05") == {"mode": "viscous", "eps": 0.05}
    assert EvolutionParams.parse_mode("inviscid") == {"mode": "inviscid"}
    with pytest.raises(ParameterError):
        EvolutionParams.parse_mode("viscous:abc")


def test_zero_data_stays_zero():
    g = Grid.from_spacing(-2.0, 2.0, 0.01)
    r = evolve(GridFunction.zeros(g), TRAFFIC, EvolutionParams(1.0, 4, "viscous", 0.1, snapshot_times=[0.0, 0.5]))
    assert len(r.snapshots) == 3
    assert all(np.all(u.values == 0) for _, u in r.snapshots)


def test_snapshots_at_step_boundaries():
    g = Grid.from_spacing(-2.0, 2.0, 0.01)
    r = evolve(smooth_bump(g), TRAFFIC, EvolutionParams(1.0, 10, "viscous", 0.1, snapshot_times=[0.26, 0.5]))
    assert [t for t, _ in r.snapshots] == pytest.approx([0.3, 0.5, 1.0])
    assert len(r.per_step_mass) == 11 and len(r.per_step_tv) == 11


def test_shifted_burgers_half_is_preserved():
    g = Grid.from_spacing(-30.0, 30.0, 0.02)
    u0 = GridFunction(g, np.where(np.abs(g.x) <= 20, 0.5, 0.0))
    u = evolve(u0, BURGERS, EvolutionParams(1.0, 10, "viscous", 0.1)).final
    inside = np.abs(g.x) <= 10
    assert np.max(np.abs(u.values[inside] - 0.5)) <= 1e-4


def test_mass_and_range_along_trajectory():
    g = Grid.from_spacing(-12.0, 12.0, 0.01)
    u0 = smooth_bump(g, height=1.0)
    r = evolve(u0, JUMP, EvolutionParams(1.0, 8, "viscous", 0.05, snapshot_times=[0.25, 0.5, 0.75],
                                         fp_tol=1e-13))
    assert np.max(np.abs(np.diff(r.per_step_mass))) <= 1e-9
    for _, u in r.snapshots:
        assert u.values.min() >= -1e-9 and u.values.max() <= 1 + 1e-9


def test_failure_reports_step_index():
    g = Grid.from_spacing(-2.0, 2.0, 0.01)
    p = EvolutionParams(0.5, 2, "inviscid", cp=ContinuationParams(cauchy_tol=1e-12))
    with pytest.raises(ContinuationNonConvergenceError) as exc:
        evolve(smooth_bump(g), TRAFFIC, p)
    assert exc.value.step == 1
    assert isinstance(exc.value, NonConvergenceError)


def test_traffic_standing_shock_stays_put():
    # 0 -> 1 is an admissible standing shock for the concave traffic flux
    g = Grid.from_spacing(-4.0, 4.0, 2e-3)
    u0 = GridFunction(g, np.where((g.x > 0) & (g.x < 3), 1.0, 0.0))
    u = evolve(u0, TRAFFIC, EvolutionParams(1.0, 10, "inviscid")).final
    inside = np.abs(g.x) < 1.5
    assert g.h * np.sum(np.abs(u.values - u0.values)[inside]) <= 0.01


def test_traffic_downward_step_opens_a_fan():
    # 1 -> 0 is a rarefaction: u = (1 - x/t)/2 on |x| <= t
    g = Grid.from_spacing(-4.0, 4.0, 2e-3)
    u0 = GridFunction(g, np.where((g.x < 0) & (g.x > -3), 1.0, 0.0))
    fan = np.clip(0.5 * (1.0 - g.x), 0.0, 1.0)
    inside = np.abs(g.x) < 1.5
    errs = []
    for n in (10, 20, 40):
        u = evolve(u0, TRAFFIC, EvolutionParams(1.0, n, "inviscid")).final
        errs.append(g.h * np.sum(np.abs(u.values - fan)[inside]))
    assert errs[0] > errs[1] > errs[2]
    assert errs[-1] <= 0.05


def test_crandall_liggett_growth_bound():
    rng = np.random.default_rng(8)
    g = Grid.from_spacing(-4.0, 4.0, 0.01)
    x = g.x
    u = GridFunction(g, np.where(np.abs(x) < 2, rng.uniform(0, 1, g.n_cells), 0.0))
    p = ResolventParams(0.05, 0.05, accel="newton", fp_tol=1e-13)
    one = l1_distance(resolvent(u, JUMP, p).u, u)
    v = u
    for n in range(1, 9):
        v = resolvent(v, JUMP, p).u
        assert l1_distance(v, u) <= n * one + n * 10 * p.fp_tol


def test_cl_sweep_decreases_on_bump():
    g = Grid.from_spacing(-4.0, 4.0, 0.01)
    tab = cl_convergence_sweep(smooth_bump(g), TRAFFIC, 0.5, [4, 8, 16, 32], eps=0.05)
    assert tab.params == [8, 16, 32]
    assert all(b < a for a, b in zip(tab.values, tab.values[1:]))
    assert tab.decreasing


def test_cl_sweep_on_fixed_point_stays_at_noise():
    g = Grid.from_spacing(-2.0, 2.0, 0.01)
    u0 = GridFunction.zeros(g)
    tab = cl_convergence_sweep(u0, TRAFFIC, 0.5, [2, 4, 8], eps=0.1)
    assert all(v <= tab.noise_floor for v in tab.values)
    assert tab.decreasing
    with pytest.raises(ParameterError):
        cl_convergence_sweep(u0, BURGERS, 0.2, [4, 2], eps=0.5)


def test_viscosity_sweep_decreases():
    g = Grid.from_spacing(-4.0, 4.0, 2e-3)
    u0 = GridFunction(g, np.where(np.abs(g.x) < 1.5, np.where(g.x < 0, 0.4, 0.7), 0.0))
    tab = viscosity_semigroup_sweep(u0, JUMP, 0.5, [0.2, 0.1, 0.05], 4)
    assert tab.decreasing
    assert tab.values[-1] < tab.values[0]
    with pytest.raises(ParameterError):
        viscosity_semigroup_sweep(u0, JUMP, 0.5, [0.05, 0.1], 4)


G = Grid.from_spacing(-3.0, 3.0, 0.02)


@settings(max_examples=15, deadline=None)
@given(piecewise(G), piecewise(G))
def test_evolution_is_contractive(u1, u2):
    p = EvolutionParams(0.5, 4, "viscous", 0.1, fp_tol=1e-13)
    d = l1_distance(evolve(u1, JUMP, p).final, evolve(u2, JUMP, p).final)
    assert d <= l1_distance(u1, u2) + 4 * 10 * 1e-13
