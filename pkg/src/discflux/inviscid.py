"""Inviscid resolvent u + lam f(x, u)_x = w as the limit of viscous resolvents.

``resolvent_inviscid`` walks a decreasing viscosity schedule with warm starts
and stops once two consecutive outputs are within ``cauchy_tol`` in L1.
``detect_jumps`` turns steep fronts of the result into JumpRecords and
checks flux continuity plus the entropy conditions for interior jumps
(cases 1, 2) and jumps at the interface (cases 3, 4).
``entropy_inequality_residual`` tests the distributional entropy inequality
for the smoothed Kruzhkov entropies sqrt(1/i + (w - k)^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from .errors import ContinuationNonConvergenceError, ParameterError
from .grid import GridFunction, l1_norm, total_variation
from .viscous import ResolventParams, resolvent

VERDICTS = (
    "admissible_case1",
    "admissible_case2",
    "admissible_case3",
    "admissible_case4",
    "rh_violation",
    "entropy_violation",
)
REFINED_FACTORS = (16.0, 8.0, 4.0, 2.0, 1.0, 0.5)
PECLET_FACTOR = 0.5  # eps >= PECLET_FACTOR * h * L keeps the discrete operator monotone


@dataclass
class ContinuationParams:
    eps_schedule: list | None = None  # None -> lam L^2, halving, down to eps_min_factor h L
    cauchy_tol: float = 2e-2
    extrapolate: bool = False  # Richardson in eps on consecutive outputs
    eps_min_factor: float = 2.0
    ratio: float = 0.5
    accel: str = "newton"
    fp_tol: float | None = None
    stop_early: bool = True  # False: run the whole schedule, test only the last gap

    def __post_init__(self):
        if not self.cauchy_tol > 0:
            raise ParameterError("cauchy_tol must be positive")
        if not 0 < self.ratio < 1:
            raise ParameterError("ratio must lie in (0, 1)")
        if self.eps_schedule is not None:
            s = [float(e) for e in self.eps_schedule]
            if len(s) < 2 or any(e <= 0 for e in s) or any(b >= a for a, b in zip(s, s[1:])):
                raise ParameterError("eps_schedule must be strictly decreasing, positive, length >= 2")
            self.eps_schedule = s

    @classmethod
    def refined(cls, h: float, L: float, **kw) -> "ContinuationParams":
        """Mesh-tied schedule c h L, c = 16, 8, ..., 1/2, with Richardson extrapolation.

        Goes down to the monotonicity floor and tightens cauchy_tol to 5e-3;
        use it when jump traces and verdicts matter.
        """
        kw.setdefault("cauchy_tol", 5e-3)
        return cls(eps_schedule=[L * h * c for c in REFINED_FACTORS], extrapolate=True, **kw)

    def schedule(self, lam: float, L: float, h: float) -> list:
        """The viscosities to visit for a given step, Lipschitz bound and mesh."""
        floor = PECLET_FACTOR * h * L
        if self.eps_schedule is not None:
            if self.eps_schedule[-1] < floor * (1 - 1e-12):
                raise ParameterError(
                    f"eps {self.eps_schedule[-1]:.3g} is below the monotonicity floor h L / 2 = {floor:.3g}"
                )
            return list(self.eps_schedule)
        eps_min = self.eps_min_factor * h * L
        eps = max(L * L * lam, 2.0 * eps_min)
        out = []
        while eps > eps_min * (1 + 1e-12):
            out.append(eps)
            eps *= self.ratio
        out.append(eps_min)
        return out


@dataclass
class JumpRecord:
    x_o: float
    u_minus: float
    u_plus: float
    f_minus: float
    f_plus: float
    f_bar: float
    u_star: float | None
    verdict: str

    def to_json(self) -> dict:
        return {
            "x_o": self.x_o,
            "u_minus": self.u_minus,
            "u_plus": self.u_plus,
            "f_bar": self.f_bar,
            "u_star": self.u_star,
            "verdict": self.verdict,
        }


@dataclass
class InviscidResult:
    """Iterates as (u, jumps); also carries the continuation telemetry."""

    u: GridFunction
    jumps: list
    gaps: list = field(default_factory=list)
    eps_used: list = field(default_factory=list)
    solver_iterations: int = 0

    def __iter__(self):
        return iter((self.u, self.jumps))


def _continuation(w, flux, lam, cp: ContinuationParams, u0=None):
    """Yield (eps, u, iterations) down the schedule with warm starts."""
    u = u0
    for eps in cp.schedule(lam, flux.L, w.grid.h):
        sol = resolvent(w, flux, ResolventParams(lam, eps, fp_tol=cp.fp_tol, accel=cp.accel), u0=u)
        u = sol.u
        yield eps, u, sol.iterations


def _extrapolated(u_prev, u_cur, eps_prev, eps_cur):
    r = eps_cur / eps_prev
    return u_cur.with_values((u_cur.values - r * u_prev.values) / (1.0 - r))


def continuation_gaps(w: GridFunction, flux, lam: float, cp: ContinuationParams):
    """Run the whole schedule; return (gaps, outputs) without a stopping test.

    With cp.extrapolate the outputs (and gaps) are the Richardson iterates.
    """
    outputs, raw, eps_seen = [], [], []
    for eps, u, _ in _continuation(w, flux, lam, cp):
        raw.append(u)
        eps_seen.append(eps)
        if cp.extrapolate:
            if len(raw) >= 2:
                outputs.append(_extrapolated(raw[-2], raw[-1], eps_seen[-2], eps_seen[-1]))
        else:
            outputs.append(u)
    gaps = [l1_norm(b - a) for a, b in zip(outputs, outputs[1:])]
    return gaps, outputs


def resolvent_inviscid(w: GridFunction, flux, lam: float, cp: ContinuationParams | None = None,
                       detect: bool = True, **jump_kwargs) -> InviscidResult:
    """J_lam w by eps-continuation of the viscous resolvent.

    Stops at the first pair of consecutive outputs within cauchy_tol in L1
    (or, with cp.stop_early off, requires the last pair to be within it);
    with cp.extrapolate the outputs are Richardson iterates and the jumps
    are detected on the last raw viscous iterate.  Raises
    ContinuationNonConvergenceError (carrying the gaps) if the schedule runs
    out first.
    """
    if not lam > 0:
        raise ParameterError("lam must be positive")
    cp = cp or ContinuationParams()
    gaps, eps_used = [], []
    eps_used_final = cp.schedule(lam, flux.L, w.grid.h)[-1]
    prev_out = prev_raw = None
    prev_eps = None
    iterations = 0
    for eps, u, it in _continuation(w, flux, lam, cp):
        iterations += it
        eps_used.append(eps)
        out = u
        if cp.extrapolate:
            out = None if prev_raw is None else _extrapolated(prev_raw, u, prev_eps, eps)
        prev_raw, prev_eps = u, eps
        if out is None:
            continue
        if prev_out is not None:
            gap = l1_norm(out - prev_out)
            gaps.append(gap)
            if gap <= cp.cauchy_tol and (cp.stop_early or eps == eps_used_final):
                # traces are read from the last raw iterate: Richardson
                # combinations put small wiggles beside each front
                jumps = detect_jumps(u, flux, **jump_kwargs) if detect else []
                return InviscidResult(out, jumps, gaps, eps_used, iterations)
        prev_out = out
    raise ContinuationNonConvergenceError(
        f"eps schedule exhausted with last gap {gaps[-1] if gaps else float('nan'):.3e}"
        f" > cauchy_tol {cp.cauchy_tol:.3e}",
        gaps=gaps,
    )


# jump detection

def _side_flux(flux, left: bool):
    return (flux.f_l, flux.df_l, flux.poly_l) if left else (flux.f_r, flux.df_r, flux.poly_r)


def _invert_on_piece(poly, g_target: float, u_ref: float) -> float:
    """Solve f(u) = g on the monotone piece of the polynomial f containing u_ref.

    If g is out of that piece's range the nearer end (a critical point) is
    returned, so a trace at a sonic corner lands on the sonic state.
    """
    crit = sorted(r.real for r in poly.deriv().roots() if abs(r.imag) < 1e-12)
    lo, hi = u_ref - 2.0, u_ref + 2.0
    for c in crit:
        if c <= u_ref:
            lo = max(lo, c)
        else:
            hi = min(hi, c)
            break
    f_lo, f_hi = poly(lo) - g_target, poly(hi) - g_target
    if f_lo * f_hi > 0:
        return lo if abs(f_lo) < abs(f_hi) else hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = poly(mid) - g_target
        if f_mid == 0 or hi - lo < 1e-15:
            return mid
        if (f_mid > 0) == (f_hi > 0):
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


def _trace(u, flux, cells, x_o, left_side):
    """Trace at x_o from two smooth cells by linear extrapolation of f(x, u)."""
    grid = u.grid
    x = grid.x[cells]
    v = u.values[cells]
    f, _, poly = _side_flux(flux, left_side)
    g = f(v)
    slope = (g[1] - g[0]) / (x[1] - x[0])
    g_o = g[0] + slope * (x_o - x[0])
    near = cells[np.argmin(np.abs(x - x_o))]
    if poly is None:
        dv = (v[1] - v[0]) / (x[1] - x[0])
        return float(v[0] + dv * (x_o - x[0]))
    return float(_invert_on_piece(poly, g_o, float(u.values[near])))


def _interior_verdict(f, u_m, u_p, f_bar, tol, mesh_step):
    n = max(2, int(math.ceil(abs(u_p - u_m) / mesh_step)) + 1)
    k = np.linspace(min(u_m, u_p), max(u_m, u_p), n)
    fk = f(k)
    if u_m < u_p:
        return "admissible_case1" if fk.min() >= f_bar - tol else "entropy_violation"
    return "admissible_case2" if fk.max() <= f_bar + tol else "entropy_violation"


def _interface_verdict(flux, u_m, u_p, f_bar, tol, mesh_step):
    """Conditions 3/4 at x = 0: scan u* on a mesh of [min, max]."""
    a, b = min(u_m, u_p), max(u_m, u_p)
    n = max(2, int(math.ceil((b - a) / mesh_step)) + 1)
    k = np.linspace(a, b, n)
    fl, fr = flux.f_l(k), flux.f_r(k)
    if u_m < u_p:
        # f_l >= f_bar on [u-, u*], f_r >= f_bar on [u*, u+]
        ok_left = np.cumprod(fl >= f_bar - tol).astype(bool)
        ok_right = np.cumprod((fr >= f_bar - tol)[::-1])[::-1].astype(bool)
        case = "admissible_case3"
    else:
        # f_r <= f_bar on [u+, u*], f_l <= f_bar on [u*, u-]
        ok_left = np.cumprod(fr <= f_bar + tol).astype(bool)
        ok_right = np.cumprod((fl <= f_bar + tol)[::-1])[::-1].astype(bool)
        case = "admissible_case4"
    good = np.flatnonzero(ok_left & ok_right)
    if good.size == 0:
        return "entropy_violation", None
    return case, float(k[good[good.size // 2]])


TAIL_RATIO = 0.97
MAX_TAIL = 400


def _walk_tail(inc, start, step):
    i = start
    peak = inc[start]
    while (
        0 <= i + step < len(inc)
        and abs(i - start) < MAX_TAIL
        and inc[i] > 1e-4 * peak
        and inc[i + step] < TAIL_RATIO * inc[i]
    ):
        i += step
    return i


def default_jump_threshold(u: GridFunction) -> float:
    """10 h TV(u), but never below 0.02."""
    return max(10.0 * u.grid.h * total_variation(u), 0.02)


def detect_jumps(u: GridFunction, flux, jump_threshold: float | None = None, *,
                 min_jump: float = 0.05, jump_tol: float = 5e-3, layer: int = 3,
                 merge_gap: int = 2, scan_step: float = 1e-3) -> list:
    """JumpRecords for the steep fronts of u.

    Increments above jump_threshold are flagged and merged across gaps of at
    most merge_gap cells.  Traces come from linear extrapolation of f(x, u)
    over two cells beyond the transition: the flagged core, then the tail
    cells whose increments keep shrinking by a factor TAIL_RATIO per cell,
    then `layer` more cells.  The flux traces are inverted on the
    monotone branch of the nearest smooth cell.  Fronts whose traces differ by
    less than min_jump (sonic corners, smeared kinks) are dropped.  A front
    touching the interface is placed at x = 0.
    """
    grid = u.grid
    v = u.values
    n_cells = grid.n_cells
    n0 = grid.n_left
    thr = default_jump_threshold(u) if jump_threshold is None else jump_threshold
    inc = np.abs(np.diff(v))
    flagged = np.flatnonzero(inc > thr)
    if flagged.size == 0:
        return []
    runs = []
    start = prev = flagged[0]
    for i in flagged[1:]:
        if i - prev > merge_gap + 1:
            runs.append((start, prev))
            start = i
        prev = i
    runs.append((start, prev))

    records = []
    for a, b in runs:
        first, last = a, b + 1  # cells inside the transition
        # follow the geometrically decaying viscous tails out of the core
        i_left = _walk_tail(inc, a, -1)
        i_right = _walk_tail(inc, b, +1)
        left_cells = np.array([i_left - layer - 1, i_left - layer])
        right_cells = np.array([i_right + 1 + layer, i_right + 2 + layer])
        if left_cells[0] < 0 or right_cells[1] >= n_cells:
            continue
        at_interface = first - 1 <= n0 - 1 and last + 1 >= n0
        if at_interface:
            x_o = 0.0
            if left_cells[1] >= n0 or right_cells[0] < n0:
                continue
        else:
            x_o = float(0.5 * (grid.x[first] + grid.x[last]))
        left_side = x_o <= 0.0 if not at_interface else True
        right_side_left = x_o <= 0.0 if not at_interface else False
        u_m = _trace(u, flux, left_cells, x_o, left_side)
        u_p = _trace(u, flux, right_cells, x_o, right_side_left)
        if abs(u_p - u_m) < min_jump:
            continue
        if not at_interface:
            # place the front where u crosses the mid value
            mid = 0.5 * (u_m + u_p)
            seg = v[first - 1:last + 2]
            xs = grid.x[first - 1:last + 2]
            s = np.sign(seg - mid)
            cross = np.flatnonzero(s[:-1] * s[1:] <= 0)
            if cross.size:
                j = cross[0]
                d = seg[j + 1] - seg[j]
                t = 0.5 if d == 0 else (mid - seg[j]) / d
                x_o = float(xs[j] + t * (xs[j + 1] - xs[j]))
        f_m = float(_side_flux(flux, left_side)[0](u_m))
        f_p = float(_side_flux(flux, right_side_left)[0](u_p))
        f_bar = 0.5 * (f_m + f_p)
        u_star = None
        if abs(f_m - f_p) > jump_tol:
            verdict = "rh_violation"
        elif at_interface:
            verdict, u_star = _interface_verdict(flux, u_m, u_p, f_bar, jump_tol, scan_step)
        else:
            f = _side_flux(flux, x_o <= 0.0)[0]
            verdict = _interior_verdict(f, u_m, u_p, f_bar, jump_tol, scan_step)
        records.append(JumpRecord(x_o, u_m, u_p, f_m, f_p, f_bar, u_star, verdict))
    return records


# entropy inequality

def _entropy_parts(k: float, i: float):
    c = 1.0 / i

    def d_eta(w):
        return (w - k) / np.sqrt(c + (w - k) ** 2)

    def dd_eta(w):
        return c / (c + (w - k) ** 2) ** 1.5

    return d_eta, dd_eta


def _entropy_flux_table(df, d_eta, lo, hi, n=40001):
    """omega mesh and q(omega) = int_0^omega eta' f' on [lo, hi] (0 included)."""
    lo, hi = min(lo, 0.0), max(hi, 0.0)
    om = np.linspace(lo, hi, n)
    integrand = d_eta(om) * df(om)
    q = cumulative_trapezoid(integrand, om, initial=0.0)
    q -= np.interp(0.0, om, q)
    return om, q


def tent_centres(grid, half_width: float) -> np.ndarray:
    """Tent centres spaced half_width/2 apart, whole tents inside the grid."""
    lo, hi = grid.x_min + half_width, grid.x_max - half_width
    m = int(math.floor((hi - lo) / (0.5 * half_width)))
    return lo + 0.5 * half_width * np.arange(m + 1)


def entropy_inequality_residual(u: GridFunction, w: GridFunction, flux, lam: float, k: float,
                                i: float = 1e4, half_width: float = 0.05) -> float:
    """max over tents phi of <lam delta_0 term + lam q(x, u)_x + eta'(u)(u - w), phi>.

    eta = sqrt(1/i + (omega - k)^2).  The q_x pairing is summed by parts over
    cell faces; the point mass pairs with phi(0) and uses u(0) = the mean of
    the two interface cells.  Tents have unit height.  Admissible limits give
    values of order h; nonpositive means the inequality holds.
    """
    if not 0.0 <= k <= 1.0:
        raise ParameterError("k must lie in [0, 1]")
    grid = u.grid
    h = grid.h
    n0 = grid.n_left
    x = grid.x
    v = u.values
    d_eta, dd_eta = _entropy_parts(k, i)
    span = (float(v.min()) - 0.01, float(v.max()) + 0.01)
    om_l, q_l = _entropy_flux_table(flux.df_l, d_eta, *span)
    om_r, q_r = _entropy_flux_table(flux.df_r, d_eta, *span)
    q = np.empty_like(v)
    q[:n0] = np.interp(v[:n0], om_l, q_l)
    q[n0:] = np.interp(v[n0:], om_r, q_r)
    u0 = 0.5 * (v[n0 - 1] + v[n0])
    om0 = np.linspace(0.0, u0, 20001)
    point = float(trapezoid(dd_eta(om0) * (flux.f_r(om0) - flux.f_l(om0)), om0))
    source = d_eta(v) * (v - w.values)
    faces = grid.x_min + h * np.arange(grid.n_cells + 1)

    worst = -np.inf
    for c in tent_centres(grid, half_width):
        phi_f = np.clip(1.0 - np.abs(faces - c) / half_width, 0.0, None)
        phi_c = np.clip(1.0 - np.abs(x - c) / half_width, 0.0, None)
        phi0 = max(0.0, 1.0 - abs(c) / half_width)
        val = -lam * float(np.sum(q * (phi_f[1:] - phi_f[:-1])))
        val += h * float(np.sum(source * phi_c))
        val += lam * phi0 * point
        worst = max(worst, val)
    return float(worst)
