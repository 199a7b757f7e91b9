"""Counterexample diagnostics for the discontinuous-flux problem.

* ``adapted_entropy_solution`` / ``compare_adapted_vs_vanishing``: the shifted
  Burgers pair with data 1/2 has the constant vanishing-viscosity solution,
  while the adapted-entropy solution opens two fans around a (1, 0) jump.
* ``traveling_wave_probe``: eps U' = f(x, U) with f > 0 on (0, 1) forces
  U' > 0, so no decreasing stationary viscous profile exists.
* ``mollified_stationarity_check``: u = 1 - H(x) zeroes the mollified flux and
  should stay put under the viscous evolution as eps -> 0.
* ``accretivity_ratio``: exact L1 ratio for the ramp family u_gamma under
  B u = f(u)_x with f = u(1 - u).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ParameterError
from .flux import get_fixture, mollify
from .grid import Grid, GridFunction, l1_distance
from .semigroup import EvolutionParams, evolve

# adapted entropy vs vanishing viscosity


def adapted_entropy_solution(t: float, grid: Grid) -> GridFunction:
    """Adapted-entropy solution at time t for the shifted Burgers pair, data 1/2.

    Left fan u = 1 + x/t on [-t/2, 0), jump (1, 0) at the interface,
    right fan u = x/t on (0, t/2], and 1/2 outside both fans.
    """
    if not t > 0:
        raise ParameterError("t must be positive")
    x = grid.x
    left = np.clip(1.0 + x / t, 0.5, 1.0)
    right = np.clip(x / t, 0.0, 0.5)
    return GridFunction(grid, np.where(x < 0.0, left, right))


def adapted_deviation_l1(t: float) -> float:
    """Exact ||adapted - 1/2||_1: each fan is a triangle of base t/2 and height 1/2."""
    return t / 4.0


@dataclass
class ComparisonReport:
    t: float
    distance: float
    reference: float
    window: tuple
    vanishing_interior_error: float
    adapted: GridFunction = field(repr=False)
    vanishing: GridFunction = field(repr=False)

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "distance": self.distance,
            "reference": self.reference,
            "window": list(self.window),
            "vanishing_interior_error": self.vanishing_interior_error,
        }


def compare_adapted_vs_vanishing(t: float, grid: Grid, ep: EvolutionParams, support=None,
                                 window=None) -> tuple:
    """Distance between the adapted-entropy and vanishing-viscosity solutions.

    The vanishing-viscosity side evolves 1/2 times the indicator of ``support``
    (default: the middle two thirds of the grid) and both profiles are
    compared on ``window`` (default: the middle third), away from the edges of
    the support.  Returns (distance, ComparisonReport).
    """
    if abs(ep.t_final - t) > 1e-12 * max(1.0, t):
        raise ParameterError("ep.t_final must equal t")
    span = grid.x_max - grid.x_min
    support = support or (grid.x_min + span / 6, grid.x_max - span / 6)
    window = window or (grid.x_min + span / 3, grid.x_max - span / 3)
    if not (support[0] < window[0] < -t / 2 and t / 2 < window[1] < support[1]):
        raise ParameterError("window must contain both fans and sit inside the support")
    flux = get_fixture("burgers_shifted")
    x = grid.x
    u0 = GridFunction(grid, np.where((x >= support[0]) & (x <= support[1]), 0.5, 0.0))
    vanishing = evolve(u0, flux, ep).final
    adapted = adapted_entropy_solution(t, grid)
    inside = (x > window[0]) & (x < window[1])
    distance = float(grid.h * np.sum(np.abs(adapted.values - vanishing.values)[inside]))
    interior = float(np.max(np.abs(vanishing.values[inside] - 0.5)))
    report = ComparisonReport(t, distance, adapted_deviation_l1(t), tuple(window), interior,
                              adapted, vanishing)
    return distance, report


# travelling-wave probe

@dataclass
class WaveProbeReport:
    epsilon: float
    delta: float
    min_slope: float  # min U' over trajectory and slope-field samples with U in [delta, 1 - delta]
    trajectory_min_slope: float
    increasing: bool
    x: np.ndarray = field(repr=False)
    U: np.ndarray = field(repr=False)

    @property
    def passed(self) -> bool:
        return self.min_slope > 0 and self.increasing

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "delta": self.delta,
            "min_slope": self.min_slope,
            "trajectory_min_slope": self.trajectory_min_slope,
            "increasing": self.increasing,
            "passed": self.passed,
        }


def traveling_wave_probe(flux, epsilon: float, x_span: float = 1.0, delta: float = 0.05,
                         n_samples: int = 201) -> WaveProbeReport:
    """Integrate eps U' = f(x, U) from U(-x_span) = 1 - delta to x_span.

    The integration stops early if U leaves [-1, 2] (the right branch of the
    shifted Burgers pair blows up in finite x).  Besides the trajectory the
    slope field f(x, U)/eps is sampled on both sides for U in
    [delta, 1 - delta], since a decreasing profile would have to cross that
    band somewhere.
    """
    if not epsilon > 0 or not x_span > 0:
        raise ParameterError("epsilon and x_span must be positive")
    if not 0 < delta < 0.5:
        raise ParameterError("delta must lie in (0, 1/2)")

    def rhs(x, U):
        return [(flux.f_l(U[0]) if x <= 0 else flux.f_r(U[0])) / epsilon]

    def leave(x, U):
        return (U[0] + 1.0) * (2.0 - U[0])

    leave.terminal = True
    sol = solve_ivp(rhs, (-x_span, x_span), [1.0 - delta], events=leave, dense_output=True,
                    rtol=1e-10, atol=1e-12, max_step=x_span / 50)
    xs = np.linspace(-x_span, sol.t[-1], n_samples)
    U = sol.sol(xs)[0]
    slope = np.array([rhs(x, [u])[0] for x, u in zip(xs, U)])
    band = (U >= delta) & (U <= 1.0 - delta)
    traj_min = float(slope[band].min()) if band.any() else float("inf")
    k = np.linspace(delta, 1.0 - delta, n_samples)
    field_min = float(min(flux.f_l(k).min(), flux.f_r(k).min()) / epsilon)
    return WaveProbeReport(epsilon, delta, min(traj_min, field_min), traj_min, bool(U[-1] > U[0]), xs, U)


# mollified flux stationarity

@dataclass
class MollifiedReport:
    delta: float
    t: float
    eps: list
    residuals: list  # ||S_t u - u||_1 on the window, one per eps
    window: tuple

    def to_json(self) -> dict:
        return {"delta": self.delta, "t": self.t, "eps": self.eps,
                "residuals": self.residuals, "window": list(self.window)}


def mollified_stationarity_check(delta: float, grid: Grid, eps_list, t: float = 0.5,
                                 n_steps: int = 10, window=None) -> MollifiedReport:
    """Evolve u = 1 - H(x) under the mollified shifted Burgers flux.

    The residual is measured on ``window`` (default: middle half of the grid)
    so the layer where u = 1 meets the zero extension at x_min is excluded.
    """
    if not delta > 0:
        raise ParameterError("delta must be positive")
    if grid.h > delta / 10 * (1 + 1e-12):
        raise ParameterError(f"grid does not resolve delta: need h <= {delta / 10:.3g}, got {grid.h:.3g}")
    flux = mollify(get_fixture("burgers_shifted"), delta)
    window = window or (grid.x_min / 2, grid.x_max / 2)
    inside = (grid.x > window[0]) & (grid.x < window[1])
    u0 = GridFunction(grid, flux.stationary_state(grid.x))
    residuals = []
    for eps in eps_list:
        u = evolve(u0, flux, EvolutionParams(t, n_steps, "viscous", float(eps))).final
        residuals.append(float(grid.h * np.sum(np.abs(u.values - u0.values)[inside])))
    return MollifiedReport(float(delta), float(t), [float(e) for e in eps_list], residuals, tuple(window))


# accretivity witness

def ramp_phi(x):
    """Lipschitz ramp: 0 for x <= -2, 1 for x >= -1, two quadratic arcs between."""
    x = np.asarray(x, dtype=float)
    s = np.clip(x + 2.0, 0.0, 1.0)
    return np.where(s <= 0.5, 2.0 * s * s, 1.0 - 2.0 * (1.0 - s) ** 2)


@dataclass(frozen=True)
class AccretivityCase:
    gamma: float
    lam: float

    def __post_init__(self):
        if not 0 < self.gamma <= 1:
            raise ParameterError("gamma must lie in (0, 1]")
        if not 0 < self.lam <= 1:
            raise ParameterError("lambda must lie in (0, 1]")

    def u(self, x, gamma=None):
        """u_gamma; gamma=0 gives the step u_0."""
        g = self.gamma if gamma is None else gamma
        x = np.asarray(x, dtype=float)
        if g == 0:
            mid = np.where(x <= 0.0, 1.0, 0.0)
        else:
            mid = np.where(x <= -g, 1.0, np.where(x >= g, 0.0, 0.5 * (1.0 - x / g)))
        return np.where(x <= -1.0, ramp_phi(x), mid)

    def Bu(self, x, gamma=None):
        """f(u_gamma)_x off the ramp (the ramp part cancels in every difference)."""
        g = self.gamma if gamma is None else gamma
        x = np.asarray(x, dtype=float)
        if g == 0:
            return np.zeros_like(x)
        return np.where(np.abs(x) < g, -x / (2.0 * g * g), 0.0)


def _abs_linear_integral(x0: float, x1: float, y0: float, y1: float) -> float:
    """Exact integral of |y| for y linear from (x0, y0) to (x1, y1)."""
    if y0 * y1 >= 0:
        return 0.5 * (x1 - x0) * (abs(y0) + abs(y1))
    xr = x0 + (x1 - x0) * y0 / (y0 - y1)
    return 0.5 * ((xr - x0) * abs(y0) + (x1 - xr) * abs(y1))


def accretivity_ratio(gamma: float, lam: float) -> float:
    """||u_g + lam B u_g - (u_0 + lam B u_0)||_1 / ||u_g - u_0||_1, integrated exactly.

    Both differences vanish outside (-gamma, gamma) and are linear on each
    half, so the integrals are sums of exact |linear| pieces.
    """
    AccretivityCase(gamma, lam)  # range checks
    num = den = 0.0
    for a, b, step in ((-gamma, 0.0, 1.0), (0.0, gamma, 0.0)):
        du = [0.5 * (1.0 - x / gamma) - step for x in (a, b)]
        dv = [d - lam * x / (2.0 * gamma * gamma) for d, x in zip(du, (a, b))]
        num += _abs_linear_integral(a, b, *dv)
        den += _abs_linear_integral(a, b, *du)
    return num / den


def accretivity_ratio_formula(gamma: float, lam: float) -> float:
    """(1 + r^2)/(1 + r) with r = lam/gamma."""
    r = lam / gamma
    return (1.0 + r * r) / (1.0 + r)


def accretivity_l1_gap(grid: Grid, gamma: float) -> float:
    """Grid L1 distance ||u_gamma - u_0||_1 (exact value gamma/2)."""
    case = AccretivityCase(gamma, 1.0)
    return l1_distance(GridFunction(grid, case.u(grid.x)), GridFunction(grid, case.u(grid.x, 0.0)))
