"""Viscous resolvent u = J_lam^eps w of  u + lam [f(x,u) - eps u_x]_x = w.

The solution is the fixed point of

    Lambda(u) = K_a * w - lam K_a' * f(., u),      a = sqrt(lam * eps),

which is an L1 contraction with factor q = L sqrt(lam/eps).  For q <= 0.9 the
map is iterated directly (Picard from u0 = w).  For larger lam the outer map
T_w u = J_{lam_o}((1 - lam_o/lam) u + (lam_o/lam) w) with lam_o = eps/(2L^2)
is iterated instead; each application is itself a contractive inner solve.

Two accelerators share the same fixed point:
  * ``anderson``: Anderson mixing on whichever map is being iterated.
  * ``newton``:  corrections from the tridiagonal system the kernel inverts,
    (1 + 2g) u_i - g (u_{i-1} + u_{i+1}) + lam (F_{i+1} - F_{i-1})/(2h) = w_i,
    with the residual still measured as ||u - Lambda(u)||.  Works for any lam.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import solve_banded

from .errors import MustUseExtendedSolverError, NonConvergenceError, ParameterError, ShapeError
from .grid import (
    GridFunction,
    _centred_difference,
    _convolve_dx_values,
    _convolve_values,
    diffusion_coefficient,
)

Q_MARGIN = 0.9
ACCELERATORS = ("picard", "anderson", "newton")
NEWTON_HOMOTOPY_DEPTH = 12


@dataclass
class ResolventParams:
    lam: float  # time step
    eps: float  # viscosity
    fp_tol: float | None = None  # L1 tolerance; None -> 1e-10 ||w||_1 + 1e-14
    max_iter: int | None = None  # None -> 10 ceil(log(tol)/log(q))
    relax: float = 1.0  # outer T_w damping
    accel: str = "picard"
    anderson_m: int = 6
    newton_max_iter: int = 60

    def __post_init__(self):
        if not (self.lam > 0 and self.eps > 0):
            raise ParameterError("lam and eps must be positive")
        if self.fp_tol is not None and not self.fp_tol > 0:
            raise ParameterError("fp_tol must be positive")
        if not 0 < self.relax <= 1:
            raise ParameterError("relax must lie in (0, 1]")
        if self.accel not in ACCELERATORS:
            raise ParameterError(f"accel must be one of {ACCELERATORS}")

    @property
    def a(self) -> float:
        return math.sqrt(self.lam * self.eps)

    def q(self, flux) -> float:
        """Contraction factor L sqrt(lam/eps) of Lambda."""
        return flux.L * math.sqrt(self.lam / self.eps)

    def lam_o(self, flux) -> float:
        return self.eps / (2.0 * flux.L**2)

    def tol(self, w: GridFunction) -> float:
        if self.fp_tol is not None:
            return self.fp_tol
        return 1e-10 * w.grid.h * float(np.sum(np.abs(w.values))) + 1e-14

    def iteration_cap(self, q: float, tol: float) -> int:
        if self.max_iter is not None:
            return int(self.max_iter)
        if q <= 0:
            return 10
        return 10 * max(1, math.ceil(math.log(tol) / math.log(q)))


@dataclass
class ResolventSolution:
    u: GridFunction
    iterations: int  # total evaluations of the contractive map
    residual_l1: float
    path: list = field(default_factory=list)  # outer residuals (or Picard residuals)
    outer_iterations: int = 0
    method: str = "picard"


def _check_same_grid(u: GridFunction, w: GridFunction):
    if not u.grid.same_as(w.grid):
        raise ShapeError("u and w must share a grid")


def _map_values(u, kw, flux, grid, lam, a):
    return kw - lam * _convolve_dx_values(flux.cell_flux(grid, u), grid.h, a)


def lambda_map(u: GridFunction, w: GridFunction, flux, p: ResolventParams) -> GridFunction:
    """Lambda(u) = K_a * w - lam K_a' * f(., u) with a = sqrt(lam eps)."""
    _check_same_grid(u, w)
    kw = _convolve_values(w.values, w.grid.h, p.a)
    return GridFunction(w.grid, _map_values(u.values, kw, flux, w.grid, p.lam, p.a))


def _l1(v, h):
    return h * float(np.sum(np.abs(v)))


def _picard(G, u0, tol, cap, h):
    u = u0
    path = []
    for it in range(1, cap + 1):
        gu = G(u)
        r = _l1(gu - u, h)
        path.append(r)
        if r <= tol:
            return u, it, r, path
        u = gu
    raise NonConvergenceError(f"Picard iteration stalled at residual {path[-1]:.3e}", path)


def _anderson(G, u0, tol, cap, h, m):
    """Anderson mixing for u = G(u); returns the first iterate with ||G(u)-u|| <= tol."""
    u = u0
    path = []
    dG, dF = [], []
    g_prev = f_prev = None
    for it in range(1, cap + 1):
        gu = G(u)
        f = gu - u
        r = _l1(f, h)
        path.append(r)
        if r <= tol:
            return u, it, r, path
        if g_prev is not None:
            dG.append(gu - g_prev)
            dF.append(f - f_prev)
            if len(dF) > m:
                dG.pop(0)
                dF.pop(0)
        g_prev, f_prev = gu, f
        if dF:
            Fm = np.column_stack(dF)
            gamma, *_ = np.linalg.lstsq(Fm, f, rcond=None)
            u = gu - np.column_stack(dG) @ gamma
        else:
            u = gu
        # safeguard: fall back to the plain step if the mixed iterate blew up
        if not np.all(np.isfinite(u)):
            u = gu
            dG.clear()
            dF.clear()
    raise NonConvergenceError(f"Anderson iteration stalled at residual {path[-1]:.3e}", path)


def resolvent_contractive(w: GridFunction, flux, p: ResolventParams, u0: GridFunction | None = None):
    """Fixed point of Lambda by Picard iteration (or Anderson with accel='anderson').

    Requires q = L sqrt(lam/eps) <= 0.9.  Starts from u0 (default w).  The
    returned u satisfies ||u - Lambda(u)||_1 = residual_l1 <= tol.
    """
    q = p.q(flux)
    if q > Q_MARGIN:
        raise MustUseExtendedSolverError(
            f"q = {q:.3f} > {Q_MARGIN}: use resolvent() for this lam/eps"
        )
    grid = w.grid
    if u0 is not None:
        _check_same_grid(u0, w)
    tol = p.tol(w)
    cap = p.iteration_cap(q, tol)
    kw = _convolve_values(w.values, grid.h, p.a)

    def G(v):
        return _map_values(v, kw, flux, grid, p.lam, p.a)

    start = (u0 if u0 is not None else w).values.copy()
    if p.accel == "anderson":
        u, it, r, path = _anderson(G, start, tol, cap, grid.h, p.anderson_m)
    else:
        u, it, r, path = _picard(G, start, tol, cap, grid.h)
    method = "anderson" if p.accel == "anderson" else "picard"
    return ResolventSolution(GridFunction(grid, u), it, r, path, 0, method)


def resolvent(w: GridFunction, flux, p: ResolventParams, u0: GridFunction | None = None):
    """J_lam^eps w for any lam > 0.

    q <= 0.9: delegates to resolvent_contractive.  Otherwise iterates T_w with
    lam_o = eps/(2L^2); the loop stops once the a-posteriori bound
    (1-t)/t ||u^{k+1} - u^k|| on the distance to the fixed point (t the
    effective contraction gap relax*lam_o/lam) and the residual
    ||u - Lambda(u)|| are both below tol.  With
    accel='newton' the fixed point of Lambda is found directly for any lam.
    """
    if u0 is not None:
        _check_same_grid(u0, w)
    if p.accel == "newton":
        return _resolvent_newton(w, flux, p, u0)
    if p.q(flux) <= Q_MARGIN:
        return resolvent_contractive(w, flux, p, u0)
    return _resolvent_outer(w, flux, p, u0)


def _resolvent_outer(w, flux, p, u0):
    grid = w.grid
    h = grid.h
    lam_o = p.lam_o(flux)
    theta = lam_o / p.lam
    gap = p.relax * theta
    tol = p.tol(w)
    inner_tol = max(0.1 * gap * tol, 1e-15)
    q_outer = 1.0 - gap
    cap = p.max_iter if p.max_iter is not None else 10 * max(
        1, math.ceil(math.log(gap * tol) / math.log(q_outer))
    )
    inner = ResolventParams(lam_o, p.eps, fp_tol=inner_tol, accel="picard")
    kernel_cap = inner.iteration_cap(inner.q(flux), inner_tol)
    a_o = inner.a

    def inner_solve(v, start):
        kv = _convolve_values(v, h, a_o)

        def G(z):
            return _map_values(z, kv, flux, grid, lam_o, a_o)

        z, it, _, _ = _picard(G, start, inner_tol, kernel_cap, h)
        return z, it

    wv = w.values
    u = (u0 if u0 is not None else w).values.copy()
    total = 0
    path = []

    def T(v):
        nonlocal total
        z, it = inner_solve((1.0 - theta) * v + theta * wv, v)
        total += it
        return (1.0 - p.relax) * v + p.relax * z

    kw = _convolve_values(wv, h, p.a)

    def true_residual(v):
        return _l1(v - _map_values(v, kw, flux, grid, p.lam, p.a), h)

    if p.accel == "anderson":
        # stop on the plain increment scaled by the same a-posteriori factor,
        # then keep going until the residual of Lambda itself is below tol
        step_tol = gap * tol / (1.0 - gap)
        outer = 0
        while True:
            u, it, _, seg = _anderson(T, u, step_tol, cap - outer, h, p.anderson_m)
            outer += it
            path.extend(seg)
            r = true_residual(u)
            if r <= tol:
                return ResolventSolution(GridFunction(grid, u), total, r, path, outer, "anderson")
            step_tol *= 0.1

    for outer in range(1, cap + 1):
        u_next = T(u)
        inc = _l1(u_next - u, h)
        path.append(inc)
        u = u_next
        if (1.0 - gap) / gap * inc <= tol:
            r = true_residual(u)
            if r <= tol:
                return ResolventSolution(GridFunction(grid, u), total, r, path, outer, "picard")
    raise NonConvergenceError(f"outer T_w iteration stalled at increment {path[-1]:.3e}", path)


def _banded_jacobian(dF, lam, h, g):
    n = len(dF)
    ab = np.empty((3, n))
    ab[1, :] = 1.0 + 2.0 * g
    ab[0, 1:] = -g + lam * dF[1:] / (2.0 * h)
    ab[2, :-1] = -g - lam * dF[:-1] / (2.0 * h)
    ab[0, 0] = 0.0
    ab[2, -1] = 0.0
    return ab


def _apply_three_point(v, g):
    out = (1.0 + 2.0 * g) * v
    out[1:] -= g * v[:-1]
    out[:-1] -= g * v[1:]
    return out


def _resolvent_newton(w, flux, p, u0, depth=0):
    try:
        return _newton_solve(w, flux, p, u0)
    except NonConvergenceError:
        if depth >= NEWTON_HOMOTOPY_DEPTH:
            raise
    # globalize: reach the same fixed point from a smoother problem first
    coarse = replace(p, eps=4.0 * p.eps)
    start = _resolvent_newton(w, flux, coarse, u0, depth + 1).u
    sol = _newton_solve(w, flux, p, start)
    sol.iterations += 1
    return sol


def _newton_solve(w, flux, p, u0):
    grid = w.grid
    h = grid.h
    a = p.a
    g = diffusion_coefficient(h, a)
    tol = p.tol(w)
    kw = _convolve_values(w.values, h, a)

    def G(v):
        return v - _map_values(v, kw, flux, grid, p.lam, a)

    u = (u0 if u0 is not None else w).values.copy()
    res = G(u)
    r = _l1(res, h)
    path = [r]
    evals = 1
    for it in range(1, p.newton_max_iter + 1):
        if r <= tol:
            return ResolventSolution(GridFunction(grid, u), evals, r, path, it - 1, "newton")
        ab = _banded_jacobian(flux.cell_dflux(grid, u), p.lam, h, g)
        step = solve_banded((1, 1), ab, -_apply_three_point(res, g))
        t = 1.0
        while True:
            trial = u + t * step
            res_t = G(trial)
            evals += 1
            r_t = _l1(res_t, h)
            if r_t < (1.0 - 1e-4 * t) * r or t < 1e-6:
                break
            t *= 0.5
        if r_t >= r and t < 1e-6:
            break
        u, res, r = trial, res_t, r_t
        path.append(r)
    if r <= tol:
        return ResolventSolution(GridFunction(grid, u), evals, r, path, len(path) - 1, "newton")
    raise NonConvergenceError(f"Newton correction stalled at residual {r:.3e}", path)


def newton_oracle(w: GridFunction, flux, lam: float, eps: float, tol: float = 1e-13, max_iter: int = 50):
    """Dense Newton solve of the finite-difference resolvent equation.

    Solves (1 + 2g) u_i - g (u_{i-1} + u_{i+1}) + lam (F_{i+1} - F_{i-1})/(2h) = w_i
    with u = 0 outside the grid and g = lam eps / h^2.  Independent of the
    convolution code path; meant for N of a few hundred.
    """
    grid = w.grid
    h = grid.h
    n = grid.n_cells
    g = lam * eps / h**2
    M = (1.0 + 2.0 * g) * np.eye(n) - g * (np.eye(n, k=1) + np.eye(n, k=-1))
    D = (np.eye(n, k=1) - np.eye(n, k=-1)) / (2.0 * h)
    u = w.values.copy()
    for _ in range(max_iter):
        F = flux.cell_flux(grid, u)
        res = M @ u + lam * D @ F - w.values
        if h * np.sum(np.abs(res)) <= tol:
            break
        J = M + lam * D * flux.cell_dflux(grid, u)[None, :]
        u = u - np.linalg.solve(J, res)
    else:
        raise NonConvergenceError("dense Newton oracle did not converge")
    return GridFunction(grid, u)


def boundary_leakage(u: GridFunction, w: GridFunction, flux, p: ResolventParams) -> float:
    """Upper bound on |mass(u) - mass(w)| caused by mass leaving through the grid ends.

    With m = M^{-1} 1 the kernel mass seen by each cell, an exact fixed point
    has mass(u) - mass(w) = -h sum_j w_j (1 - m_j) + lam h sum_j F_j (D m)_j;
    the bound replaces each term by its absolute value.
    """
    grid = w.grid
    h = grid.h
    m = _convolve_values(np.ones(grid.n_cells), h, p.a)
    dm = _centred_difference(m, h)
    F = flux.cell_flux(grid, u.values)
    return h * float(np.sum(np.abs(w.values) * np.abs(1.0 - m) + p.lam * np.abs(F * dm)))


def interface_residual(u: GridFunction, flux, epsilon: float) -> float:
    """|f_r(u(0)) - f_l(u(0)) - eps (u_x(0+) - u_x(0-))| from one-sided stencils.

    u(0) averages the linear extrapolations from both sides; u_x(0+-) use the
    second-order one-sided three-cell differences.
    """
    v = u.values
    h = u.grid.h
    n = u.grid.n_left
    if n < 3 or u.grid.n_cells - n < 3:
        raise ParameterError("need three cells on each side of the interface")
    u_minus = 1.5 * v[n - 1] - 0.5 * v[n - 2]
    u_plus = 1.5 * v[n] - 0.5 * v[n + 1]
    u0 = 0.5 * (u_minus + u_plus)
    ux_plus = (-2.0 * v[n] + 3.0 * v[n + 1] - v[n + 2]) / h
    ux_minus = (2.0 * v[n - 1] - 3.0 * v[n - 2] + v[n - 3]) / h
    if hasattr(flux, "f_l"):
        jump = float(flux.f_r(u0)) - float(flux.f_l(u0))
    else:
        jump = float(flux.eval(1e-300, u0) - flux.eval(0.0, u0))
    return abs(jump - epsilon * (ux_plus - ux_minus))
