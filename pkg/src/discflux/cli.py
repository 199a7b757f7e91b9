"""Command-line runner: ``discflux <command> [flags]`` or ``discflux run --config spec.json``.

Every run writes its artifacts plus ``manifest.json`` into the output
directory.  Exit codes: 0 ok, 2 invalid input, 3 solver nonconvergence,
4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .data import EXAMPLES, SHAPES, get_example, make_shape
from .errors import DiscfluxError, NonConvergenceError, OracleFailureError
from .flux import Flux, get_fixture
from .grid import Grid, GridFunction, l1_norm, read_csv, write_csv
from .inviscid import ContinuationParams, entropy_inequality_residual, resolvent_inviscid
from .ode_oracle import ode_oracle
from .semigroup import EvolutionParams, cl_convergence_sweep, evolve, viscosity_semigroup_sweep
from .viscous import ResolventParams, resolvent

log = logging.getLogger("discflux")

ACTIONS = ("resolvent", "inviscid", "evolve", "sweep", "diagnose")
DIAGNOSES = ("adapted-compare", "twave", "mollified", "accretivity")
DEFAULT_H = 2e-3
EXIT_OK, EXIT_INVALID, EXIT_NONCONVERGENCE, EXIT_IO = 0, 2, 3, 4


class SpecError(DiscfluxError, ValueError):
    """The experiment description is malformed."""


@dataclass
class ExperimentSpec:
    name: str
    action: str
    flux: object = None  # fixture name or {"left": [...], "right": [...], "L": optional}
    grid: dict | None = None  # {"x_min", "x_max", "n_cells" | "h"}
    data: dict = field(default_factory=lambda: {"shape": "zero"})
    params: dict = field(default_factory=dict)
    outputs: str = "out"

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        unknown = set(d) - {"name", "action", "flux", "grid", "data", "params", "outputs"}
        if unknown:
            raise SpecError(f"unknown spec keys {sorted(unknown)}")
        if "action" not in d:
            raise SpecError("spec needs an action")
        spec = cls(**{"name": d.get("action"), **d})
        spec.validate()
        return spec

    def to_dict(self) -> dict:
        return asdict(self)

    def validate(self):
        if self.action not in ACTIONS:
            raise SpecError(f"action must be one of {ACTIONS}, got {self.action!r}")
        if not isinstance(self.data, dict):
            raise SpecError("data must be an object")
        if self.action != "diagnose":
            build_flux(self)  # raises for unknown fixtures


# building blocks

def build_flux(spec: ExperimentSpec):
    f = spec.flux
    if f is None and "example" in spec.data:
        f = get_example(spec.data["example"]).flux
    if f is None:
        raise SpecError("no flux given")
    if isinstance(f, str):
        return get_fixture(f)
    if isinstance(f, dict) and "left" in f and "right" in f:
        return Flux.polynomial(f["left"], f["right"], f.get("name", "polynomial"), L=f.get("L"))
    raise SpecError("flux must be a fixture name or {'left': [...], 'right': [...]}")


def _data_support(data: dict) -> tuple:
    if "example" in data:
        b = get_example(data["example"]).w.breaks
        return b[0], b[-1]
    shape = data.get("shape", "zero")
    if shape == "step":
        return float(data["breaks"][0]), float(data["breaks"][-1])
    if shape == "bump":
        c, w = float(data.get("centre", 0.0)), float(data.get("width", 1.0))
        return c - w, c + w
    if shape == "riemann":
        cut = data.get("x_cut")
        return (-cut, cut) if cut is not None else (-1.0, 1.0)
    return -1.0, 1.0


def build_grid(spec: ExperimentSpec, lam: float, eps: float = 0.0) -> Grid:
    """Grid from the spec, or the data support padded by 10 max(sqrt(lam eps), sqrt(lam))."""
    g = spec.grid
    if g is None:
        a, b = _data_support(spec.data)
        pad = max(10.0 * max(math.sqrt(lam * eps), math.sqrt(lam)), 1.0)
        return Grid.from_spacing(min(a, 0.0) - pad, max(b, 0.0) + pad, DEFAULT_H)
    if "h" in g:
        return Grid.from_spacing(float(g["x_min"]), float(g["x_max"]), float(g["h"]))
    try:
        return Grid(float(g["x_min"]), float(g["x_max"]), int(g["n_cells"]))
    except DiscfluxError as exc:
        h = (float(g["x_max"]) - float(g["x_min"])) / int(g["n_cells"])
        grid = Grid.from_spacing(float(g["x_min"]), float(g["x_max"]), h)
        log.warning("grid adjusted to put a face at x=0 (%s): [%g, %g] with %d cells",
                    exc, grid.x_min, grid.x_max, grid.n_cells)
        return grid


def build_data(spec: ExperimentSpec, grid: Grid) -> GridFunction:
    d = dict(spec.data)
    if "csv" in d:
        return read_csv(d["csv"], grid)
    if "example" in d:
        return get_example(d["example"]).w.sample(grid)
    shape = d.pop("shape", "zero")
    return make_shape(grid, shape, **d)


def _lam_from(spec: ExperimentSpec) -> float:
    p = spec.params
    if "lam" in p:
        return float(p["lam"])
    if "example" in spec.data:
        return get_example(spec.data["example"]).lam
    raise SpecError(f"{spec.action} needs params.lam")


def _cp_from(p: dict, grid: Grid, flux) -> ContinuationParams | None:
    kw = {}
    if p.get("eps_schedule"):
        kw["eps_schedule"] = [float(e) for e in p["eps_schedule"]]
    for key in ("cauchy_tol", "eps_min_factor"):
        if p.get(key) is not None:
            kw[key] = float(p[key])
    if p.get("extrapolate"):
        kw["extrapolate"] = True
    if p.get("refined"):
        return ContinuationParams.refined(grid.h, flux.L, **{k: v for k, v in kw.items()
                                                             if k == "cauchy_tol"})
    return ContinuationParams(**kw) if kw else None


# artifact writers

class Artifacts:
    def __init__(self, out: Path):
        self.out = out
        self.files = []
        out.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        self.files.append(name)
        return self.out / name

    def profile(self, u: GridFunction, name="profile.csv"):
        write_csv(u, self.path(name))

    def table(self, name, header, rows):
        with open(self.path(name), "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])

    def json(self, name, obj):
        with open(self.path(name), "w") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def gnuplot(self):
        lines = ["set datafile separator ','", "set key autotitle columnhead"]
        csvs = [f for f in self.files if f.endswith(".csv")]
        for f in csvs:
            lines.append(f"set title '{f}'")
            lines.append(f"plot '{f}' using 1:2 with lines")
            lines.append("pause -1")
        with open(self.path("plot.gp"), "w") as fh:
            fh.write("\n".join(lines) + "\n")


# actions

def _do_resolvent(spec, art):
    flux = build_flux(spec)
    p = spec.params
    lam, eps = _lam_from(spec), float(p["eps"])
    grid = build_grid(spec, lam, eps)
    w = build_data(spec, grid)
    rp = ResolventParams(lam, eps, fp_tol=p.get("fp_tol"), max_iter=p.get("max_iter"),
                         relax=float(p.get("relax", 1.0)), accel=p.get("accel", "picard"))
    sol = resolvent(w, flux, rp)
    art.profile(sol.u)
    return {"iterations": sol.iterations, "outer_iterations": sol.outer_iterations,
            "residual_l1": sol.residual_l1, "method": sol.method, "n_cells": grid.n_cells}


def _do_inviscid(spec, art):
    flux = build_flux(spec)
    p = spec.params
    lam = _lam_from(spec)
    grid = build_grid(spec, lam)
    w = build_data(spec, grid)
    res = resolvent_inviscid(w, flux, lam, _cp_from(p, grid, flux))
    art.profile(res.u)
    art.json("jumps.json", [j.to_json() for j in res.jumps])
    art.table("convergence.csv", ["param", "gap"], zip(res.eps_used[-len(res.gaps):], res.gaps))
    tel = {"eps_used": res.eps_used, "gaps": res.gaps, "solver_iterations": res.solver_iterations,
           "n_jumps": len(res.jumps), "verdicts": [j.verdict for j in res.jumps]}
    if p.get("oracle"):
        if "example" not in spec.data and spec.data.get("shape") != "step":
            raise SpecError("--oracle needs piecewise-constant data (example or step)")
        pc = (get_example(spec.data["example"]).w if "example" in spec.data
              else _step_pc(spec.data))
        o = ode_oracle(pc, flux, lam, grid)
        art.profile(o, "oracle.csv")
        # the middle 60% of the grid avoids the layers where far-field data meets
        # the zero extension
        span = grid.x_max - grid.x_min
        inside = np.abs(grid.x - (grid.x_min + grid.x_max) / 2) < 0.3 * span
        tel["oracle_l1"] = l1_norm(o - res.u)
        tel["oracle_l1_interior"] = float(grid.h * np.sum(np.abs(o.values - res.u.values)[inside]))
        print(f"oracle vs continuation: L1 = {tel['oracle_l1']:.3e} on the grid, "
              f"{tel['oracle_l1_interior']:.3e} on its middle 60%")
    if p.get("entropy_check"):
        ks = [round(k, 10) for k in np.arange(1, 10) / 10]
        rows = [(k, entropy_inequality_residual(res.u, w, flux, lam, k)) for k in ks]
        art.table("entropy.csv", ["k", "residual"], rows)
        tel["entropy_max"] = max(r for _, r in rows)
    return tel


def _step_pc(d):
    from .ode_oracle import PiecewiseConstant
    return PiecewiseConstant(d["breaks"], [0.0, *d["values"], 0.0])


def _evolution_params(p, t, n):
    mode = EvolutionParams.parse_mode(p.get("mode", "viscous:0.1"))
    return EvolutionParams(t, n, snapshot_times=[float(s) for s in p.get("snapshots", [])], **mode)


def _do_evolve(spec, art):
    flux = build_flux(spec)
    p = spec.params
    t = float(p["t"])
    ep = _evolution_params(p, t, p.get("n"))
    n = ep.steps(flux)
    grid = build_grid(spec, t / n, ep.eps or 0.0)
    u0 = build_data(spec, grid)
    res = evolve(u0, flux, ep)
    for ts, u in res.snapshots[:-1]:
        art.profile(u, f"snapshot_t{ts:.6g}.csv")
    art.profile(res.final)
    art.table("telemetry.csv", ["step", "mass", "tv"],
              [(k, m, v) for k, (m, v) in enumerate(zip(res.per_step_mass, res.per_step_tv))])
    return {"lam": res.lam, "n_steps": n, "iterations": res.iterations,
            "mass_drift": res.per_step_mass[-1] - res.per_step_mass[0]}


def _do_sweep(spec, art):
    flux = build_flux(spec)
    p = spec.params
    t = float(p["t"])
    kind = p.get("kind", "cl")
    if kind == "cl":
        n_list = [int(n) for n in p.get("n_list", [8, 16, 32, 64])]
        mode = EvolutionParams.parse_mode(p.get("mode", "viscous:0.05"))
        grid = build_grid(spec, t / n_list[0], mode.get("eps") or 0.0)
        table = cl_convergence_sweep(build_data(spec, grid), flux, t, n_list, mode["mode"], mode.get("eps"))
    elif kind == "viscosity":
        eps_list = [float(e) for e in p.get("eps_list", [0.2, 0.1, 0.05, 0.025])]
        n = int(p.get("n", 10))
        grid = build_grid(spec, t / n, eps_list[0])
        table = viscosity_semigroup_sweep(build_data(spec, grid), flux, t, eps_list, n)
    else:
        raise SpecError("sweep kind must be 'cl' or 'viscosity'")
    art.table("convergence.csv", ["param", "gap"], table.rows())
    return {"kind": kind, "values": table.values, "decreasing": table.decreasing}


def _do_diagnose(spec, art):
    from . import diagnostics as dg

    p = spec.params
    kind = p.get("kind")
    if kind == "adapted-compare":
        t = float(p.get("t", 1.0))
        grid = build_grid(spec, t) if spec.grid else Grid.from_spacing(-30.0, 30.0, 0.02)
        ep = EvolutionParams(t, int(p.get("n", 20)), "viscous", float(p.get("eps", 0.1)))
        d, rep = dg.compare_adapted_vs_vanishing(t, grid, ep)
        art.profile(rep.adapted, "adapted.csv")
        art.profile(rep.vanishing, "profile.csv")
        report = {**rep.to_json(), "passed": d > 0 and abs(d - rep.reference) <= 1e-2}
    elif kind == "twave":
        flux = get_fixture(spec.flux or "burgers_shifted") if not isinstance(spec.flux, dict) else build_flux(spec)
        rep = dg.traveling_wave_probe(flux, float(p.get("eps", 0.1)), float(p.get("x_span", 1.0)),
                                      float(p.get("delta", 0.05)))
        art.table("trajectory.csv", ["x", "value"], zip(rep.x.tolist(), rep.U.tolist()))
        report = rep.to_json()
    elif kind == "mollified":
        delta = float(p.get("delta", 0.1))
        grid = build_grid(spec, 1.0) if spec.grid else Grid.from_spacing(-2.0, 2.0, delta / 100)
        rep = dg.mollified_stationarity_check(delta, grid, p.get("eps_list", [0.1, 0.01, 1e-3]),
                                              float(p.get("t", 0.5)), int(p.get("n", 10)))
        report = {**rep.to_json(), "passed": rep.residuals[-1] <= 0.02}
    elif kind == "accretivity":
        gamma, lam = float(p.get("gamma", 1.0)), float(p.get("lam", 0.5))
        ratio = dg.accretivity_ratio(gamma, lam)
        report = {"gamma": gamma, "lam": lam, "ratio": ratio,
                  "formula": dg.accretivity_ratio_formula(gamma, lam), "non_accretive_witness": ratio < 1}
    else:
        raise SpecError(f"diagnose kind must be one of {DIAGNOSES}")
    art.json("report.json", report)
    return {"kind": kind}


HANDLERS = {"resolvent": _do_resolvent, "inviscid": _do_inviscid, "evolve": _do_evolve,
            "sweep": _do_sweep, "diagnose": _do_diagnose}


@dataclass
class RunReport:
    exit_code: int
    message: str
    files: list = field(default_factory=list)
    telemetry: dict = field(default_factory=dict)


def _input_hash(spec: ExperimentSpec) -> str:
    h = hashlib.sha256(json.dumps(spec.to_dict(), sort_keys=True).encode())
    csv_path = spec.data.get("csv") if isinstance(spec.data, dict) else None
    if csv_path:
        h.update(Path(csv_path).read_bytes())
    return h.hexdigest()


def run(spec: ExperimentSpec, gnuplot: bool = False) -> RunReport:
    """Execute one spec; never raises for library errors, maps them to exit codes."""
    t0 = time.perf_counter()
    try:
        spec.validate()
        art = Artifacts(Path(spec.outputs))
        telemetry = HANDLERS[spec.action](spec, art)
        if gnuplot:
            art.gnuplot()
        manifest = {
            "name": spec.name,
            "version": __version__,
            "spec": spec.to_dict(),
            "telemetry": telemetry,
            "wall_time_s": time.perf_counter() - t0,
            "input_sha256": _input_hash(spec),
            "files": sorted(art.files + ["manifest.json"]),
        }
        with open(Path(spec.outputs) / "manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True, default=float)
            fh.write("\n")
        return RunReport(EXIT_OK, "ok", manifest["files"], telemetry)
    except (NonConvergenceError, OracleFailureError) as exc:
        return RunReport(EXIT_NONCONVERGENCE, f"{type(exc).__name__}: {exc}")
    except OSError as exc:
        return RunReport(EXIT_IO, f"I/O error: {exc}")
    except (DiscfluxError, KeyError, TypeError, ValueError) as exc:
        return RunReport(EXIT_INVALID, f"invalid input: {type(exc).__name__}: {exc}")


# suite

SUITE_SPECS = (
    {"name": "ex61_resolvent", "action": "resolvent", "flux": "burgers_shifted",
     "grid": {"x_min": -30, "x_max": 30, "h": 0.02},
     "data": {"shape": "step", "breaks": [-20, 20], "values": [0.5]},
     "params": {"lam": 0.1, "eps": 0.1}},
    {"name": "ex61_adapted_compare", "action": "diagnose", "params": {"kind": "adapted-compare", "t": 1.0}},
    {"name": "ex62_twave", "action": "diagnose", "flux": "burgers_shifted",
     "params": {"kind": "twave", "eps": 0.01}},
    {"name": "ex63_mollified", "action": "diagnose", "params": {"kind": "mollified", "delta": 0.1}},
    *({"name": k if k == "ex72" else f"ex71_{k}", "action": "inviscid",
       "grid": {"x_min": -5, "x_max": 5, "h": 1e-3}, "data": {"example": k},
       "params": {"refined": True, "oracle": True, "entropy_check": True}} for k in EXAMPLES),
    {"name": "ex73_accretivity", "action": "diagnose", "params": {"kind": "accretivity", "gamma": 1.0, "lam": 0.5}},
)


def reproduce_suite(out: str = "suite_out", criteria=None, acceptance: bool = True) -> list:
    """Run the canned example specs, then the acceptance checks; print one line per row.

    Returns a list of (name, passed, detail).  Failures never abort the suite.
    """
    from .acceptance import run_all

    rows = []
    for d in SUITE_SPECS:
        spec = ExperimentSpec.from_dict({**d, "outputs": str(Path(out) / d["name"])})
        rep = run(spec)
        rows.append((spec.name, rep.exit_code == EXIT_OK, rep.message))
        print(f"[{'PASS' if rows[-1][1] else 'FAIL'}] {spec.name}: {rep.message}", flush=True)
    if acceptance:
        for res in run_all(criteria):
            rows.append((f"criterion_{res.number}", res.passed, res.detail))
            print(res.line(), flush=True)
    Path(out).mkdir(parents=True, exist_ok=True)
    with open(Path(out) / "summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["name", "status", "detail"])
        for name, ok, detail in rows:
            writer.writerow([name, "pass" if ok else "fail", detail])
    return rows


# argument parsing

def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _common(p):
    p.add_argument("--config", help="JSON experiment spec; flags below override it")
    p.add_argument("--name")
    p.add_argument("--flux", help="fixture name (traffic, traffic_jump, burgers_shifted, traffic_84)")
    p.add_argument("--flux-poly", nargs=2, metavar=("LEFT", "RIGHT"),
                   help="polynomial coefficients, lowest order first, e.g. 0,1,-1 0,2,-2")
    p.add_argument("--grid", nargs=3, type=float, metavar=("X_MIN", "X_MAX", "N_CELLS"))
    p.add_argument("--h", type=float, help="grid spacing (with --domain or derived extent)")
    p.add_argument("--domain", nargs=2, type=float, metavar=("X_MIN", "X_MAX"))
    p.add_argument("--data", choices=SHAPES, help="builtin data shape")
    p.add_argument("--example", choices=sorted(EXAMPLES), help="worked example data (sets flux and lam)")
    p.add_argument("--csv", help="read data from an x,value CSV")
    p.add_argument("--breaks", type=_floats)
    p.add_argument("--values", type=_floats)
    p.add_argument("--left", type=float)
    p.add_argument("--right", type=float)
    p.add_argument("--x-cut", type=float)
    p.add_argument("--centre", type=float)
    p.add_argument("--width", type=float)
    p.add_argument("--height", type=float)
    p.add_argument("--out", help="output directory")
    p.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="discflux", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command")

    p = sub.add_parser("run", help="run a JSON spec as is")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--gnuplot", action="store_true")

    p = sub.add_parser("resolvent", help="viscous resolvent J_lam^eps w")
    _common(p)
    p.add_argument("--lam", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--fp-tol", type=float)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--relax", type=float)
    p.add_argument("--accel", choices=("picard", "anderson", "newton"))

    p = sub.add_parser("inviscid", help="inviscid resolvent by eps-continuation")
    _common(p)
    p.add_argument("--lam", type=float)
    p.add_argument("--eps-schedule", type=_floats)
    p.add_argument("--cauchy-tol", type=float)
    p.add_argument("--extrapolate", action="store_true", default=None)
    p.add_argument("--refined", action="store_true", default=None,
                   help="mesh-tied schedule down to h L / 2 with extrapolation")
    p.add_argument("--oracle", action="store_true", default=None)
    p.add_argument("--entropy-check", action="store_true", default=None)

    p = sub.add_parser("evolve", help="Crandall-Liggett evolution")
    _common(p)
    p.add_argument("--t", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--mode", help="viscous:EPS or inviscid")
    p.add_argument("--snapshots", type=_floats)

    p = sub.add_parser("sweep", help="convergence tables in n or eps")
    _common(p)
    p.add_argument("--kind", choices=("cl", "viscosity"))
    p.add_argument("--t", type=float)
    p.add_argument("--n-list", type=lambda s: [int(v) for v in s.split(",")])
    p.add_argument("--mode")
    p.add_argument("--eps-list", type=_floats)
    p.add_argument("--n", type=int)

    p = sub.add_parser("diagnose", help="counterexample diagnostics")
    _common(p)
    p.add_argument("kind", choices=DIAGNOSES)
    p.add_argument("--t", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--eps-list", type=_floats)
    p.add_argument("--delta", type=float)
    p.add_argument("--x-span", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--lam", type=float)

    p = sub.add_parser("suite", help="reproduce the worked examples and acceptance checks")
    p.add_argument("--out", default="suite_out")
    p.add_argument("--criteria", type=lambda s: [int(v) for v in s.split(",")],
                   help="comma-separated criterion numbers (default all)")
    p.add_argument("--no-acceptance", action="store_true")
    return ap


PARAM_FLAGS = {
    "resolvent": ("lam", "eps", "fp_tol", "max_iter", "relax", "accel"),
    "inviscid": ("lam", "eps_schedule", "cauchy_tol", "extrapolate", "refined", "oracle", "entropy_check"),
    "evolve": ("t", "n", "mode", "snapshots"),
    "sweep": ("kind", "t", "n_list", "mode", "eps_list", "n"),
    "diagnose": ("kind", "t", "n", "eps", "eps_list", "delta", "x_span", "gamma", "lam"),
}
DATA_FLAGS = ("breaks", "values", "left", "right", "x_cut", "centre", "width", "height")


def spec_from_args(args) -> ExperimentSpec:
    d = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            d = json.load(fh)
    if args.command != "run":
        if d.get("action", args.command) != args.command:
            raise SpecError(f"config action {d['action']!r} does not match command {args.command!r}")
        d["action"] = args.command
        if args.flux_poly:
            d["flux"] = {"left": _floats(args.flux_poly[0]), "right": _floats(args.flux_poly[1])}
        elif args.flux:
            d["flux"] = args.flux
        if args.grid:
            d["grid"] = {"x_min": args.grid[0], "x_max": args.grid[1], "n_cells": int(args.grid[2])}
        elif args.domain or args.h:
            if not (args.domain and args.h):
                raise SpecError("--domain and --h go together")
            d["grid"] = {"x_min": args.domain[0], "x_max": args.domain[1], "h": args.h}
        data = dict(d.get("data", {}))
        if args.example:
            data = {"example": args.example}
        elif args.csv:
            data = {"csv": args.csv}
        elif args.data:
            data = {"shape": args.data}
        for k in DATA_FLAGS:
            if getattr(args, k) is not None:
                data[k] = getattr(args, k)
        if data:
            d["data"] = data
        params = dict(d.get("params", {}))
        for k in PARAM_FLAGS[args.command]:
            if getattr(args, k, None) is not None:
                params[k] = getattr(args, k)
        d["params"] = params
        if args.name:
            d["name"] = args.name
    if args.out:
        d["outputs"] = args.out
    return ExperimentSpec.from_dict(d)


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.command is None:
        make_parser().print_help()
        return EXIT_INVALID
    if args.command == "suite":
        rows = reproduce_suite(args.out, args.criteria, not args.no_acceptance)
        return EXIT_OK if all(ok for _, ok, _ in rows) else 1
    try:
        spec = spec_from_args(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DiscfluxError, KeyError, TypeError, ValueError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    rep = run(spec, gnuplot=args.gnuplot)
    if rep.exit_code == EXIT_OK:
        print(f"{spec.name}: wrote {', '.join(rep.files)} to {spec.outputs}")
    else:
        print(f"error: {rep.message}", file=sys.stderr)
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
