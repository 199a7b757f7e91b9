"""Crandall-Liggett evolution u(t) ~ (J_{t/n})^n u0 and its convergence sweeps.

Each step is one resolvent solve with the fixed step lam = t_final / n_steps,
either viscous (fixed eps) or inviscid (eps-continuation).  Snapshots are
taken at step boundaries only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ContinuationNonConvergenceError, NonConvergenceError, ParameterError
from .grid import GridFunction, l1_distance, total_variation
from .inviscid import ContinuationParams, resolvent_inviscid
from .viscous import ResolventParams, resolvent

MODES = ("viscous", "inviscid")
JITTER = 1.1  # viscosity sweeps may grow by at most 10% between levels


@dataclass
class EvolutionParams:
    t_final: float
    n_steps: int | None = None  # None -> smallest n with lam <= eps / (2 L^2) (viscous only)
    mode: str = "viscous"
    eps: float | None = None  # viscous mode
    cp: ContinuationParams | None = None  # inviscid mode
    snapshot_times: list = field(default_factory=list)
    accel: str = "newton"
    fp_tol: float | None = None

    def __post_init__(self):
        if not self.t_final > 0:
            raise ParameterError("t_final must be positive")
        if self.mode not in MODES:
            raise ParameterError(f"mode must be one of {MODES}")
        if self.mode == "viscous" and not (self.eps is not None and self.eps > 0):
            raise ParameterError("viscous mode needs eps > 0")
        if self.mode == "inviscid" and self.n_steps is None:
            raise ParameterError("inviscid mode needs an explicit n_steps")
        if self.n_steps is not None and (int(self.n_steps) != self.n_steps or self.n_steps < 1):
            raise ParameterError("n_steps must be a positive integer")
        ts = [float(t) for t in self.snapshot_times]
        if any(b < a for a, b in zip(ts, ts[1:])):
            raise ParameterError("snapshot_times must be sorted")
        if any(t < 0 or t > self.t_final * (1 + 1e-12) for t in ts):
            raise ParameterError("snapshot_times must lie in [0, t_final]")
        self.snapshot_times = ts

    def steps(self, flux) -> int:
        if self.n_steps is not None:
            return int(self.n_steps)
        return max(1, math.ceil(self.t_final * 2.0 * flux.L**2 / self.eps))

    @classmethod
    def parse_mode(cls, text: str) -> dict:
        """'viscous:0.1' -> {'mode': 'viscous', 'eps': 0.1}; 'inviscid' -> {'mode': 'inviscid'}."""
        name, _, arg = text.partition(":")
        if name == "viscous":
            try:
                return {"mode": "viscous", "eps": float(arg)}
            except ValueError:
                raise ParameterError(f"bad viscous mode {text!r}; expected viscous:EPS") from None
        if name == "inviscid" and not arg:
            return {"mode": "inviscid"}
        raise ParameterError(f"bad mode {text!r}; expected viscous:EPS or inviscid")


@dataclass
class EvolutionResult:
    snapshots: list  # (time, GridFunction)
    per_step_mass: list
    per_step_tv: list
    lam: float = 0.0
    iterations: int = 0

    @property
    def final(self) -> GridFunction:
        return self.snapshots[-1][1]


def _step(u, flux, p: EvolutionParams, lam):
    if p.mode == "viscous":
        sol = resolvent(u, flux, ResolventParams(lam, p.eps, fp_tol=p.fp_tol, accel=p.accel))
        return sol.u, sol.iterations
    # small steps pass the Cauchy test at coarse eps, so every step runs the
    # schedule down to its floor unless the caller says otherwise
    cp = p.cp or ContinuationParams(stop_early=False)
    r = resolvent_inviscid(u, flux, lam, cp, detect=False)
    return r.u, r.solver_iterations


def evolve(u0: GridFunction, flux, p: EvolutionParams) -> EvolutionResult:
    """Apply the resolvent n times with lam = t_final / n.

    The final state is always the last snapshot; requested snapshot times
    are rounded to the nearest step.  A failing solve is re-raised with
    ``step`` set to its 1-based index.
    """
    n = p.steps(flux)
    lam = p.t_final / n
    wanted = {}
    for t in p.snapshot_times:
        wanted.setdefault(min(n, round(t / lam)), t)
    u = u0
    snapshots = [(0.0, u0)] if 0 in wanted else []
    mass, tv = [u0.mass()], [total_variation(u0)]
    iterations = 0
    for k in range(1, n + 1):
        try:
            u, it = _step(u, flux, p, lam)
        except ContinuationNonConvergenceError as exc:
            raise ContinuationNonConvergenceError(f"step {k}: {exc}", gaps=exc.gaps, step=k) from exc
        except NonConvergenceError as exc:
            raise NonConvergenceError(f"step {k}: {exc}", path=exc.path, step=k) from exc
        iterations += it
        mass.append(u.mass())
        tv.append(total_variation(u))
        if k in wanted and k != n:
            snapshots.append((k * lam, u))
    snapshots.append((n * lam, u))
    return EvolutionResult(snapshots, mass, tv, lam, iterations)


@dataclass
class SweepTable:
    """One convergence table: ``values[k]`` belongs to ``params[k]``."""

    name: str
    params: list
    values: list
    noise_floor: float = 0.0
    jitter: float = 1.0

    @property
    def decreasing(self) -> bool:
        """Every entry below jitter * previous, or both at the noise floor."""
        return all(
            b < self.jitter * a or max(a, b) <= self.noise_floor
            for a, b in zip(self.values, self.values[1:])
        )

    def rows(self):
        return list(zip(self.params, self.values))


def cl_convergence_sweep(u0: GridFunction, flux, t: float, n_list, mode: str = "viscous",
                         eps: float | None = None, cp: ContinuationParams | None = None,
                         accel: str = "newton", fp_tol: float | None = None) -> SweepTable:
    """Gaps ||u_{n_k} - u_{n_{k+1}}||_1 between consecutive n in n_list.

    The k-th row is labelled by n_{k+1}.
    """
    n_list = [int(n) for n in n_list]
    if len(n_list) < 2 or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ParameterError("n_list must be increasing with at least two entries")
    finals = [
        evolve(u0, flux, EvolutionParams(t, n, mode, eps, cp, accel=accel, fp_tol=fp_tol)).final
        for n in n_list
    ]
    gaps = [l1_distance(a, b) for a, b in zip(finals, finals[1:])]
    tol = fp_tol if fp_tol is not None else 1e-10 * max(u0.grid.h * abs(u0.values).sum(), 1e-4)
    return SweepTable("cl_gap", n_list[1:], gaps, noise_floor=10 * n_list[-1] * tol)


def viscosity_semigroup_sweep(u0: GridFunction, flux, t: float, eps_list, n: int,
                              cp: ContinuationParams | None = None, accel: str = "newton") -> SweepTable:
    """L1 distance of the viscous evolution to the inviscid one, per eps."""
    eps_list = [float(e) for e in eps_list]
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ParameterError("eps_list must be decreasing")
    ref = evolve(u0, flux, EvolutionParams(t, n, "inviscid", cp=cp)).final
    dist = [
        l1_distance(evolve(u0, flux, EvolutionParams(t, n, "viscous", eps, accel=accel)).final, ref)
        for eps in eps_list
    ]
    noise = (cp or ContinuationParams()).cauchy_tol
    return SweepTable("vv_distance", eps_list, dist, noise_floor=noise, jitter=JITTER)
