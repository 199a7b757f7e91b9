"""The twelve acceptance checks, shared by the test suite and ``discflux suite``.

Each ``criterion_N`` returns a CriterionResult; nothing here asserts, so a
failing check is reported rather than raised.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .data import get_example, random_pairs, random_piecewise_constant, riemann, bump
from .diagnostics import accretivity_ratio, compare_adapted_vs_vanishing, traveling_wave_probe
from .flux import get_fixture
from .grid import Grid, GridFunction, l1_norm, total_variation
from .inviscid import ContinuationParams, continuation_gaps, resolvent_inviscid
from .ode_oracle import ode_oracle
from .semigroup import EvolutionParams, cl_convergence_sweep, evolve, viscosity_semigroup_sweep
from .viscous import (
    ResolventParams,
    boundary_leakage,
    interface_residual,
    newton_oracle,
    resolvent,
)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0
    data: dict = field(default_factory=dict, repr=False)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d}. {self.title}: {self.detail} ({self.seconds:.1f}s)"


def _timed(number, title):
    def wrap(fn):
        def run(*args, **kw):
            t0 = time.perf_counter()
            passed, detail, data = fn(*args, **kw)
            return CriterionResult(number, title, bool(passed), detail, time.perf_counter() - t0, data)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


@_timed(1, "accretivity witness 5/6")
def criterion_1():
    t0 = time.perf_counter()
    errs = [abs(accretivity_ratio(2 * lam, lam) - 5.0 / 6.0) for lam in (0.1, 0.25, 0.5)]
    dt = time.perf_counter() - t0
    return max(errs) <= 1e-12 and dt < 1.0, f"max |ratio - 5/6| = {max(errs):.1e}", {"errors": errs}


@_timed(2, "constant 1/2 solution")
def criterion_2():
    t0 = time.perf_counter()
    grid = Grid.from_spacing(-30.0, 30.0, 0.02)
    flux = get_fixture("burgers_shifted")
    x = grid.x
    w = GridFunction(grid, np.where(np.abs(x) <= 20.0, 0.5, 0.0))
    inside = np.abs(x) <= 10.0
    errs = {}
    for eps in (1.0, 0.1, 0.01):
        u = resolvent(w, flux, ResolventParams(0.1, eps)).u
        errs[f"resolvent eps={eps}"] = float(np.max(np.abs(u.values[inside] - 0.5)))
        u = evolve(w, flux, EvolutionParams(1.0, 20, "viscous", eps)).final
        errs[f"evolve eps={eps}"] = float(np.max(np.abs(u.values[inside] - 0.5)))
    worst = max(errs.values())
    dt = time.perf_counter() - t0
    return worst <= 1e-4 and dt < 30.0, f"worst sup error {worst:.1e}", errs


def _ensemble(n_pairs=100, seed=2024, h=4e-3):
    """(fixture, lam, eps, w1, w2, u1, u2, w_max, u_max, tol) for the contraction ensemble."""
    grid = Grid.from_spacing(-4.0, 4.0, h)
    pairs = random_pairs(seed, n_pairs, grid)
    for name in ("traffic", "traffic_jump"):
        flux = get_fixture(name)
        for lam in (0.01, 0.5):
            for eps in (0.1, 0.01):
                for w1, w2 in pairs:
                    # pointwise slack 1e-9 needs an L1 residual well below 1e-9 h
                    p = ResolventParams(lam, eps, fp_tol=ENSEMBLE_FP_TOL, accel="newton")
                    wm = w1.with_values(np.maximum(w1.values, w2.values))
                    u1, u2, um = (resolvent(w, flux, p).u for w in (w1, w2, wm))
                    yield name, flux, p, w1, w2, u1, u2, wm, um


ENSEMBLE_FP_TOL = 1e-13
_ENSEMBLE_CACHE = {}


def _ensemble_cached():
    if "rows" not in _ENSEMBLE_CACHE:
        _ENSEMBLE_CACHE["rows"] = list(_ensemble())
    return _ENSEMBLE_CACHE["rows"]


@_timed(3, "contraction suite")
def criterion_3():
    t0 = time.perf_counter()
    counts = dict(l1=0, one_sided=0, monotone=0, conservation=0, max_principle=0)
    rows = _ensemble_cached()
    for name, flux, p, w1, w2, u1, u2, wm, um in rows:
        slack = 10 * max(p.tol(w1), p.tol(w2), p.tol(wm))
        h = w1.grid.h
        if l1_norm(u1 - u2) > l1_norm(w1 - w2) + slack:
            counts["l1"] += 1
        pos = lambda f: h * float(np.sum(np.maximum(f.values, 0.0)))
        if pos(u1 - u2) > pos(w1 - w2) + slack:
            counts["one_sided"] += 1
        if np.any(u1.values > um.values + 1e-9) or np.any(u2.values > um.values + 1e-9):
            counts["monotone"] += 1
        for w, u in ((w1, u1), (w2, u2)):
            if abs(u.mass() - w.mass()) > 1e-8 + boundary_leakage(u, w, flux, p):
                counts["conservation"] += 1
            if u.values.min() < -1e-9 or u.values.max() > 1 + 1e-9:
                counts["max_principle"] += 1
    dt = time.perf_counter() - t0
    n = len(rows)
    ok = not any(counts.values()) and dt < 300.0
    detail = f"{n} pairs, violations " + ", ".join(f"{k}={v}" for k, v in counts.items())
    return ok, detail, counts


@_timed(4, "TV bound")
def criterion_4():
    bad, worst = 0, -math.inf
    rows = _ensemble_cached()
    for *_, w1, w2, u1, u2, wm, um in rows:
        for w, u in ((w1, u1), (w2, u2), (wm, um)):
            excess = total_variation(u) - (2.0 + total_variation(w))
            worst = max(worst, excess)
            bad += excess > 1e-6
    return bad == 0, f"{bad} violations, max TV(u) - 2 - TV(w) = {worst:.3f}", {"violations": bad}


@_timed(5, "interface residual halves under refinement")
def criterion_5(n_cases=20, seed=55):
    flux = get_fixture("traffic_jump")
    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(n_cases):
        pc = random_piecewise_constant(rng)
        res = []
        for h in (4e-3, 2e-3):
            grid = Grid.from_spacing(-5.0, 5.0, h)
            u = resolvent(pc.sample(grid), flux, ResolventParams(0.5, 0.1, accel="newton")).u
            res.append(interface_residual(u, flux, 0.1))
        ratios.append(res[0] / res[1] if res[1] > 0 else math.inf)
    r = np.array(ratios)
    ok = bool(np.all((r >= 1.6) & (r <= 2.6)))
    detail = f"ratios in [{r.min():.2f}, {r.max():.2f}] (median {np.median(r):.2f}); required [1.6, 2.6]"
    return ok, detail, {"ratios": ratios}


@_timed(6, "resolvent formula")
def criterion_6(n_cases=20, seed=66):
    rng = np.random.default_rng(seed)
    grid = Grid.from_spacing(-4.0, 4.0, 4e-3)
    worst = 0.0
    for k in range(n_cases):
        flux = get_fixture(("traffic", "traffic_jump")[k % 2])
        lam = float(rng.choice([0.05, 0.2, 0.5, 1.0]))
        eps = float(rng.choice([0.1, 0.05]))
        w = random_piecewise_constant(rng).sample(grid)
        p = ResolventParams(lam, eps)
        tol = p.tol(w)
        u = resolvent(w, flux, p).u
        mu = lam / 2
        v = w.scaled(mu / lam) + u.scaled((lam - mu) / lam)
        u2 = resolvent(v, flux, ResolventParams(mu, eps, fp_tol=tol)).u
        worst = max(worst, l1_norm(u - u2) / tol)
    return worst <= 10.0, f"max L1 mismatch = {worst:.2f} fp_tol", {"worst_over_tol": worst}


@_timed(7, "eps -> 0 Cauchy convergence")
def criterion_7(n_cases=10, seed=77, h=2.5e-4):
    flux = get_fixture("traffic_jump")
    grid = Grid.from_spacing(-4.0, 4.0, h)
    rng = np.random.default_rng(seed)
    cp = ContinuationParams(eps_schedule=list(np.geomspace(0.4, 1e-3, 10)))
    decreasing, finals = [], []
    for _ in range(n_cases):
        w = random_piecewise_constant(rng).sample(grid)
        gaps, _ = continuation_gaps(w, flux, 0.2, cp)
        decreasing.append(all(b < a for a, b in zip(gaps, gaps[1:])))
        finals.append(gaps[-1])
    ok = all(decreasing) and max(finals) <= 1e-3
    detail = (f"strictly decreasing {sum(decreasing)}/{n_cases}; final gaps "
              f"[{min(finals):.1e}, {max(finals):.1e}], required <= 1e-3")
    return ok, detail, {"final_gaps": finals, "decreasing": decreasing}


def _example_runs(h=1e-3):
    grid = Grid.from_spacing(-5.0, 5.0, h)
    out = {}
    for name in ("case1", "case2", "case3", "ex72"):
        ex = get_example(name)
        flux = get_fixture(ex.flux)
        w = ex.w.sample(grid)
        res = resolvent_inviscid(w, flux, ex.lam, ContinuationParams.refined(h, flux.L))
        out[name] = (ex, flux, w, res)
    return grid, out


_EXAMPLE_CACHE = {}


def _examples_cached():
    if "runs" not in _EXAMPLE_CACHE:
        _EXAMPLE_CACHE["runs"] = _example_runs()
    return _EXAMPLE_CACHE["runs"]


@_timed(8, "entropy verdicts")
def criterion_8():
    grid, runs = _examples_cached()
    j3 = runs["case3"][3].jumps
    j72 = runs["ex72"][3].jumps
    ok3 = (len(j3) == 1 and j3[0].verdict == "admissible_case1"
           and abs(j3[0].f_minus - j3[0].f_plus) <= 5e-3)
    at0 = [j for j in j72 if abs(j.x_o) <= 2 * grid.h]
    ok72 = (len(j72) == 2 and len(at0) == 1
            and at0[0].verdict in ("admissible_case3", "admissible_case4") and at0[0].u_star is not None)
    detail = ("case 3: " + ", ".join(f"{j.verdict}@{j.x_o:.4f}" for j in j3)
              + "; ex72: " + ", ".join(f"{j.verdict}@{j.x_o:.4f}" for j in j72))
    return ok3 and ok72, detail, {"case3": [j.to_json() for j in j3], "ex72": [j.to_json() for j in j72]}


@_timed(9, "oracle equivalence")
def criterion_9():
    grid, runs = _examples_cached()
    window = (grid.x > -3.0) & (grid.x < 3.0)
    dists = {}
    for name, (ex, flux, w, res) in runs.items():
        o = ode_oracle(ex.w, flux, ex.lam, grid)
        dists[name] = float(grid.h * np.sum(np.abs(o.values - res.u.values)[window]))
    # fixed point vs dense Newton on N = 401 smooth cases
    g401 = Grid(-2.0, 2.01, 401)
    newton = []
    for name, lam, eps, height in (("traffic", 1e-3, 0.1, 0.8), ("traffic", 0.02, 0.1, 0.5),
                                   ("traffic_jump", 5e-3, 0.2, 0.6)):
        flux = get_fixture(name)
        w = bump(g401, 0.0, 1.0, height)
        u = resolvent(w, flux, ResolventParams(lam, eps)).u
        newton.append(l1_norm(u - newton_oracle(w, flux, lam, eps)))
    ok = max(dists.values()) <= 5e-3 and max(newton) <= 1e-7
    detail = ("oracle L1 " + ", ".join(f"{k}={v:.4f}" for k, v in dists.items())
              + f"; Newton max {max(newton):.1e} on N={g401.n_cells}")
    return ok, detail, {"oracle": dists, "newton": newton}


@_timed(10, "semigroup convergence telemetry")
def criterion_10(h=2e-3):
    grid = Grid.from_spacing(-6.0, 6.0, h)
    cl = {}
    for name in ("traffic", "traffic_jump"):
        t = cl_convergence_sweep(bump(grid, 0.0, 1.0, 0.8), get_fixture(name), 1.0, [8, 16, 32, 64], eps=0.05)
        cl[name] = t
    vv = viscosity_semigroup_sweep(riemann(grid, 0.4, 0.7, x_cut=2.0), get_fixture("traffic_jump"), 1.0,
                                   [0.2, 0.1, 0.05, 0.025], 10)
    cl_ok = all(all(b < a for a, b in zip(t.values, t.values[1:])) for t in cl.values())
    vv_ok = vv.decreasing and vv.values[-1] <= 0.05
    detail = ("CL gaps " + "; ".join(f"{k}: " + ", ".join(f"{v:.4f}" for v in t.values) for k, t in cl.items())
              + " | vv distances " + ", ".join(f"{v:.4f}" for v in vv.values) + " (final <= 0.05 required)")
    return cl_ok and vv_ok, detail, {"cl": {k: t.values for k, t in cl.items()}, "vv": vv.values}


@_timed(11, "adapted vs vanishing separation")
def criterion_11():
    grid = Grid.from_spacing(-30.0, 30.0, 0.02)
    d, rep = compare_adapted_vs_vanishing(1.0, grid, EvolutionParams(1.0, 20, "viscous", 0.1),
                                          support=(-20.0, 20.0), window=(-10.0, 10.0))
    ok = d > 0 and abs(d - rep.reference) <= 1e-2
    return ok, f"distance {d:.5f} vs closed form {rep.reference:.5f}", rep.to_json()


@_timed(12, "travelling-wave nonexistence probe")
def criterion_12():
    flux = get_fixture("burgers_shifted")
    reps = [traveling_wave_probe(flux, eps) for eps in (0.1, 0.01)]
    mins = [r.min_slope for r in reps]
    return min(mins) > 0, "min U' = " + ", ".join(f"{m:.4g}" for m in mins), {"min_slope": mins}


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12)


def run_all(select=None) -> list:
    """Run the criteria (all, or the numbers in ``select``) and return their results."""
    out = []
    for k, fn in enumerate(CRITERIA, start=1):
        if select is None or k in select:
            out.append(fn())
    return out
