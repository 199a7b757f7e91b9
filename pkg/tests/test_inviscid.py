import numpy as np
import pytest

from discflux.data import get_example
from discflux.errors import ContinuationNonConvergenceError, ParameterError
from discflux.flux import get_fixture
from discflux.grid import Grid, GridFunction
from discflux.inviscid import (
    VERDICTS,
    ContinuationParams,
    continuation_gaps,
    default_jump_threshold,
    detect_jumps,
    entropy_inequality_residual,
    resolvent_inviscid,
)
from discflux.ode_oracle import ode_oracle

TRAFFIC = get_fixture("traffic")
JUMP = get_fixture("traffic_jump")
H = 1e-3
GRID = Grid.from_spacing(-4.0, 4.0, H)


def run_example(name):
    e = get_example(name)
    f = get_fixture(e.flux)
    return resolvent_inviscid(e.w.sample(GRID), f, e.lam, ContinuationParams.refined(H, f.L))


def test_default_schedule_halves_down_to_the_floor():
    s = ContinuationParams().schedule(0.5, 2.0, 1e-3)
    assert s[0] == pytest.approx(2.0)
    assert s[-1] == pytest.approx(4e-3)
    assert all(b < a for a, b in zip(s, s[1:]))


def test_schedule_checks():
    with pytest.raises(ParameterError):
        ContinuationParams(eps_schedule=[0.1, 0.2])
    with pytest.raises(ParameterError):
        ContinuationParams(cauchy_tol=0.0)
    with pytest.raises(ParameterError):
        ContinuationParams(eps_schedule=[0.1, 1e-5]).schedule(0.5, 1.0, 1e-3)
    assert ContinuationParams.refined(1e-3, 2.0).eps_schedule[-1] == pytest.approx(1e-3)


def test_constant_half_is_a_fixed_point_for_shifted_burgers():
    g = Grid.from_spacing(-30.0, 30.0, 0.02)
    w = GridFunction(g, np.where(np.abs(g.x) <= 20, 0.5, 0.0))
    res = resolvent_inviscid(w, get_fixture("burgers_shifted"), 0.1)
    inside = np.abs(g.x) <= 10
    assert np.max(np.abs(res.u.values[inside] - 0.5)) <= 1e-6
    assert res.jumps == []


def test_result_unpacks_and_records_telemetry():
    u, jumps = run_example("case1")
    res = run_example("case1")
    assert jumps == [] and u.grid.same_as(GRID)
    assert res.gaps[-1] <= 5e-3
    assert res.solver_iterations > 0


def test_case3_shock_traces():
    res = run_example("case3")
    (j,) = res.jumps
    assert j.verdict == "admissible_case1"
    assert j.x_o == pytest.approx(-0.132745, abs=5 * H)
    assert j.u_plus == pytest.approx(1 - j.u_minus, abs=5e-3)


def test_ex72_interface_and_shock():
    res = run_example("ex72")
    iface, shock = res.jumps
    assert iface.x_o == 0.0 and iface.verdict == "admissible_case4"
    assert iface.u_minus == pytest.approx(0.4, abs=5e-3)
    assert iface.u_plus == pytest.approx(0.139445, abs=5e-3)
    assert shock.verdict == "admissible_case1"
    assert shock.x_o == pytest.approx(0.196381, abs=5 * H)


def test_unreachable_tolerance_raises_with_gaps():
    e = get_example("case3")
    cp = ContinuationParams(cauchy_tol=1e-9)
    with pytest.raises(ContinuationNonConvergenceError) as exc:
        resolvent_inviscid(e.w.sample(GRID), TRAFFIC, e.lam, cp)
    assert len(exc.value.gaps) >= 2


def test_continuation_gaps_shrink():
    e = get_example("case2")
    gaps, outs = continuation_gaps(e.w.sample(GRID), TRAFFIC, e.lam, ContinuationParams())
    assert len(outs) == len(gaps) + 1
    assert gaps[-1] < gaps[0]


def step_function(left, right, x0, grid=GRID):
    return GridFunction(grid, np.where(grid.x < x0, left, right))


@pytest.mark.parametrize(
    "left, right, x0, flux, verdict",
    [
        (0.2, 0.8, 0.5, TRAFFIC, "admissible_case1"),
        (0.8, 0.2, 0.5, TRAFFIC, "entropy_violation"),
        (0.2, 0.5, 0.5, TRAFFIC, "rh_violation"),
        (0.4, 0.139445, 0.0, JUMP, "admissible_case4"),
        (0.6, 0.1, 0.0, JUMP, "rh_violation"),
    ],
)
def test_verdicts_on_synthetic_fronts(left, right, x0, flux, verdict):
    (j,) = detect_jumps(step_function(left, right, x0), flux)
    assert j.verdict == verdict
    assert j.x_o == pytest.approx(x0, abs=H)
    # traces at the sonic value 1/2 invert f with square-root sensitivity
    assert (j.u_minus, j.u_plus) == pytest.approx((left, right), abs=1e-6)


def test_interface_star_state_lies_between_traces():
    (j,) = detect_jumps(step_function(0.4, 0.139445, 0.0), JUMP)
    assert j.u_plus <= j.u_star <= j.u_minus
    assert j.verdict in VERDICTS


def test_smooth_profile_has_no_jumps():
    u = GridFunction(GRID, 0.5 + 0.3 * np.tanh(GRID.x))
    assert detect_jumps(u, TRAFFIC) == []
    assert default_jump_threshold(u) == pytest.approx(0.02)


def test_entropy_residual_vanishes_for_constants():
    w = GridFunction(GRID, np.full(GRID.n_cells, 0.3))
    for k in (0.1, 0.5, 0.9):
        assert abs(entropy_inequality_residual(w, w, TRAFFIC, 0.5, k)) <= 1e-12
    with pytest.raises(ParameterError):
        entropy_inequality_residual(w, w, TRAFFIC, 0.5, 1.5)


def test_entropy_residual_separates_admissible_from_flipped_shock():
    e = get_example("case3")
    g = Grid.from_spacing(-5.0, 5.0, H)
    u = ode_oracle(e.w, TRAFFIC, e.lam, g)
    w = e.w.sample(g)
    ks = np.linspace(0.1, 0.9, 9)
    good = max(entropy_inequality_residual(u, w, TRAFFIC, e.lam, k) for k in ks)
    assert good <= 1e-3
    # reflect u -> 1 - u around the shock: same flux values, wrong direction
    near = np.abs(g.x + 0.132745) < 0.05
    bad_u = u.with_values(np.where(near, 1.0 - u.values, u.values))
    bad = max(entropy_inequality_residual(bad_u, w, TRAFFIC, e.lam, k) for k in ks)
    assert bad >= 0.01
