"""Semi-analytic inviscid resolvent for piecewise-constant data.

For u + lam f(x, u)_x = w the flux value g(x) = f(x, u(x)) is continuous and
obeys g' = (w - u)/lam.  Each side's flux must be strictly concave on [0, 1]
with its maximum fmax at an interior sonic point sigma, so every g < fmax has
a lower state lo(g) < sigma (f' > 0, fixed by the data on the left) and an
upper state up(g) > sigma (f' < 0, fixed by the data on the right).

The construction runs two sweeps:

* right to left: the upper candidate U-hat, started from the right far
  field or from an anchor at a break of w where an upper piece can hand over
  to a lower piece or a sonic plateau;
* left to right: the actual profile, in one of the states L (lower branch),
  U (following U-hat) or P (sonic plateau u = sigma, only where w = sigma).
  An L piece switches to U where g_L = g-hat; since g_L - g-hat is strictly
  increasing there is at most one such point per overlap, found by brentq.

Where w != sigma the ODE is integrated in g; where w = sigma it is integrated
in s = sign(u - sigma) sqrt(fmax - g), in which ds/dx = 1/(2 lam sqrt(r)) is
regular through the sonic point.  Sonic points are solve_ivp events.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import OracleFailureError, ParameterError, UnsupportedFluxError
from .grid import Grid, GridFunction

RTOL = 1e-10
ATOL = 1e-12
SONIC_TOL = 1e-9


@dataclass(frozen=True)
class PiecewiseConstant:
    """w = values[k] on (breaks[k-1], breaks[k]), with breaks[-1] = -inf etc."""

    breaks: tuple
    values: tuple

    def __post_init__(self):
        b = tuple(float(x) for x in self.breaks)
        v = tuple(float(x) for x in self.values)
        if len(v) != len(b) + 1:
            raise ParameterError("need len(values) == len(breaks) + 1")
        if any(b2 <= b1 for b1, b2 in zip(b, b[1:])):
            raise ParameterError("breaks must be strictly increasing")
        object.__setattr__(self, "breaks", b)
        object.__setattr__(self, "values", v)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.asarray(self.values)[np.searchsorted(self.breaks, x, side="left")]

    def sample(self, grid: Grid, far_field: bool = True) -> GridFunction:
        """Cell-centre samples; with far_field=False the outer pieces are zeroed."""
        v = self(grid.x)
        if not far_field:
            v = np.where((grid.x < self.breaks[0]) | (grid.x > self.breaks[-1]), 0.0, v)
        return GridFunction(grid, v)


class _Side:
    """Branch inverses of one strictly concave polynomial flux."""

    def __init__(self, poly: Polynomial):
        mesh = np.linspace(0.0, 1.0, 1001)
        if poly.degree() < 2 or np.any(poly.deriv(2)(mesh) >= 0):
            raise UnsupportedFluxError("ode_oracle needs a strictly concave flux on [0, 1]")
        roots = [r.real for r in poly.deriv().roots() if abs(r.imag) < 1e-12]
        inside = [r for r in roots if 0.0 < r < 1.0]
        if not inside:
            raise UnsupportedFluxError("flux maximum must lie inside (0, 1)")
        self.f = poly
        self.df = poly.deriv()
        self.sigma = float(inside[0])
        self.fmax = float(poly(self.sigma))
        # fmax - f(sigma + t) = t^2 r(t), exactly, via a Taylor shift
        shifted = poly(Polynomial([self.sigma, 1.0]))
        coef = -np.asarray(shifted.coef, dtype=float)
        self.r = Polynomial(coef[2:])
        self.dr = self.r.deriv()

    def t_of_s(self, s: float) -> float:
        t = s / math.sqrt(self.r(0.0))
        for _ in range(50):
            rt = max(self.r(t), 1e-300)
            phi = t * math.sqrt(rt) - s
            dphi = math.sqrt(rt) + t * self.dr(t) / (2.0 * math.sqrt(rt))
            step = phi / dphi
            t -= step
            if abs(step) <= 1e-15 * (1.0 + abs(t)):
                break
        return t

    def u_of_s(self, s: float) -> float:
        return self.sigma + self.t_of_s(s)

    def s_of_u(self, u: float) -> float:
        t = u - self.sigma
        return t * math.sqrt(max(self.r(t), 0.0))

    def lo(self, g: float) -> float:
        return self.u_of_s(-math.sqrt(max(self.fmax - g, 0.0)))

    def up(self, g: float) -> float:
        return self.u_of_s(math.sqrt(max(self.fmax - g, 0.0)))


@dataclass
class _Piece:
    """One smooth piece of the profile on [x0, x1]."""

    x0: float
    x1: float
    kind: str  # "L", "U" or "P"
    side: _Side
    var: str  # "g", "s" or "const"
    sol: object = None  # dense output of solve_ivp, or a constant value of the variable
    w: float = 0.0

    def y(self, x):
        if self.var == "const":
            return self.sol
        return float(self.sol(x)[0])

    def g(self, x) -> float:
        y = self.y(x)
        if self.var == "s":
            return self.side.fmax - y * y
        if self.var == "const" and self.kind == "P":
            return self.side.fmax
        return y

    def u(self, x) -> float:
        if self.kind == "P":
            return self.side.sigma
        if self.var == "s":
            return self.side.u_of_s(self.y(x))
        gx = self.g(x)
        return self.side.lo(gx) if self.kind == "L" else self.side.up(gx)


@dataclass
class OracleJump:
    x: float
    u_minus: float
    u_plus: float


@dataclass
class OracleProfile:
    pieces: list
    jumps: list = field(default_factory=list)

    def value(self, x: float) -> float:
        for p in self.pieces:
            if p.x0 <= x <= p.x1:
                return p.u(x)
        raise OracleFailureError(f"x = {x} outside the constructed profile")

    def sample(self, grid: Grid) -> GridFunction:
        return GridFunction(grid, [self.value(x) for x in grid.x])


def _sides(flux):
    if getattr(flux, "poly_l", None) is None or getattr(flux, "poly_r", None) is None:
        raise UnsupportedFluxError("ode_oracle needs polynomial fluxes")
    return _Side(flux.poly_l), _Side(flux.poly_r)


def _is_sonic_value(w, side):
    return abs(w - side.sigma) <= SONIC_TOL


def _integrate(side, w, lam, kind, x_start, x_end, y0, var):
    """Integrate one branch from x_start towards x_end, stopping at a sonic point.

    Returns (piece, hit_sonic).  The piece always spans x_start..x_stop in
    increasing x order.
    """
    if x_start == x_end:
        return _Piece(x_start, x_end, kind, side, "const", y0, w), False
    if var == "g":
        branch = side.lo if kind == "L" else side.up

        def rhs(x, y):
            return [(w - branch(y[0])) / lam]

        def sonic(x, y):
            return side.fmax - y[0]

        sonic.direction = -1.0
    else:

        def rhs(x, y):
            t = side.t_of_s(y[0])
            return [1.0 / (2.0 * lam * math.sqrt(max(side.r(t), 1e-300)))]

        def sonic(x, y):
            return y[0]

        # s increases in x, so forward runs cross zero upwards and
        # leftward runs cross it downwards
        sonic.direction = 1.0 if x_end > x_start else -1.0
    sonic.terminal = True
    res = solve_ivp(
        rhs, (x_start, x_end), [y0], method="RK45", rtol=RTOL, atol=ATOL,
        dense_output=True, events=sonic,
    )
    if res.status < 0:
        raise OracleFailureError(f"ODE integration failed: {res.message}")
    x_stop = float(res.t[-1])
    hit = res.status == 1
    a, b = sorted((x_start, x_stop))
    return _Piece(a, b, kind, side, var, res.sol, w), hit


class _Builder:
    def __init__(self, w_pc: PiecewiseConstant, flux, lam: float, x_lo: float, x_hi: float):
        if not lam > 0:
            raise ParameterError("lam must be positive")
        self.left, self.right = _sides(flux)
        self.lam = lam
        breaks = sorted(set(w_pc.breaks) | {0.0})
        if breaks[0] <= x_lo or breaks[-1] >= x_hi:
            raise ParameterError("domain must contain every break of w and the origin")
        self.breaks = breaks
        self.edges = [x_lo] + breaks + [x_hi]
        mids = [0.5 * (a + b) for a, b in zip(self.edges, self.edges[1:])]
        self.w = [float(w_pc(m)) for m in mids]
        self.side = [self.left if m <= 0 else self.right for m in mids]
        self.uhat: list = []  # upper candidate pieces, any order
        self.anchors: dict = {}  # break index -> (g*, right start kind)

    # right-to-left sweep for the upper candidate
    def build_uhat(self):
        n = len(self.w)
        k = n - 1
        side, w = self.side[k], self.w[k]
        g = side.f(w) if w > side.sigma + SONIC_TOL else None
        if g is not None:
            self.uhat.append(_Piece(self.edges[k], self.edges[k + 1], "U", side, "const", g, w))
        for k in range(n - 2, -1, -1):
            a, b = self.side[k], self.side[k + 1]
            x_b = self.edges[k + 1]
            if g is not None and a is not b and g > a.fmax:
                g = None  # the left flux cannot carry this upper state
            if g is None:
                g = self._anchor(k)
            if g is None:
                continue
            side, w = a, self.w[k]
            if _is_sonic_value(w, side):
                s0 = math.sqrt(max(side.fmax - g, 0.0))
                piece, hit = _integrate(side, w, self.lam, "U", x_b, self.edges[k], s0, "s")
            else:
                piece, hit = _integrate(side, w, self.lam, "U", x_b, self.edges[k], g, "g")
            self.uhat.append(piece)
            g = None if hit else piece.g(piece.x0)

    def _anchor(self, k):
        """Break between intervals k and k+1 where an upper piece may end."""
        a, b = self.side[k], self.side[k + 1]
        g_star = min(a.fmax, b.fmax)
        v = a.up(g_star)
        left_ok = v > a.sigma + SONIC_TOL or self.w[k] > a.sigma + SONIC_TOL
        r = b.lo(g_star)
        if r < b.sigma - SONIC_TOL:
            start = "L"
            right_ok = True
        else:
            right_ok = self.w[k + 1] <= b.sigma + SONIC_TOL
            start = "P" if _is_sonic_value(self.w[k + 1], b) else "L"
        if left_ok and right_ok:
            self.anchors[k + 1] = (g_star, start)
            return g_star
        return None

    def _uhat_at(self, x):
        for p in self.uhat:
            if p.x0 <= x <= p.x1:
                return p
        return None

    def _uhat_left_end_in(self, x0, x1):
        """Leftmost point in (x0, x1) where an upper piece begins at a sonic point."""
        starts = [p.x0 for p in self.uhat if x0 < p.x0 < x1 and p.x0 not in self.edges]
        return min(starts) if starts else None

    # left-to-right sweep
    def build_profile(self) -> OracleProfile:
        pieces, jumps = [], []
        n = len(self.w)
        side, w = self.side[0], self.w[0]
        x = self.edges[0]
        if w < side.sigma - SONIC_TOL:
            state, g = "L", side.f(w)
        elif _is_sonic_value(w, side):
            state, g = "P", side.fmax
        else:
            if self._uhat_at(x) is None:
                raise OracleFailureError("upper far field without an upper candidate")
            state, g = "U", None
        k = 0
        while True:
            x_end = self.edges[k + 1]
            side, w = self.side[k], self.w[k]
            if state == "L":
                state, x, g = self._run_lower(k, x, g, pieces, jumps)
            elif state == "P":
                x_up = self._uhat_left_end_in(x, x_end)
                if x_up is not None:
                    pieces.append(_Piece(x, x_up, "P", side, "const", 0.0, w))
                    state, x = "U", x_up
                else:
                    pieces.append(_Piece(x, x_end, "P", side, "const", 0.0, w))
                    x, g = x_end, side.fmax
            if state == "U":
                p = self._uhat_at(x)
                if p is None:
                    raise OracleFailureError(f"lost the upper candidate at x = {x:.6g}")
                pieces.append(_Piece(x, p.x1, "U", p.side, p.var, p.sol, p.w))
                x = p.x1
                g = p.g(x)
                while k + 2 < len(self.edges) and x >= self.edges[k + 1]:
                    k += 1
                if x >= self.edges[-1]:
                    break
                kb = self.edges.index(x) if x in self.edges else None
                nxt = self._uhat_at_right_of(x)
                if kb in self.anchors and (nxt is None):
                    g_star, start = self.anchors[kb]
                    b = self.side[kb]
                    u_left = p.u(x)
                    u_right = b.sigma if start == "P" else b.lo(g_star)
                    if abs(u_left - u_right) > 1e-7:
                        jumps.append(OracleJump(x, u_left, u_right))
                    state, g = start, g_star
                    continue
                if nxt is None:
                    raise OracleFailureError(f"upper candidate ends without an anchor at x = {x:.6g}")
                continue
            if x >= self.edges[-1]:
                break
            if x < self.edges[k + 1]:
                continue
            # crossing break k+1 in state L or P
            if k + 1 >= n:
                break
            a, b = self.side[k], self.side[k + 1]
            w_next = self.w[k + 1]
            nxt = self._uhat_at_right_of(x)
            if state == "P":
                if w_next < b.sigma - SONIC_TOL or a is not b:
                    state = "L"
                elif w_next > b.sigma + SONIC_TOL:
                    if nxt is None or abs(nxt.g(x) - g) > 1e-8:
                        raise OracleFailureError(f"plateau cannot enter w > sigma at x = {x:.6g}")
                    state = "U"
            if state == "L" and a is not b:
                if g > b.fmax + 1e-12:
                    raise OracleFailureError("interface flux exceeds the right maximum")
                u_left = a.sigma if pieces[-1].kind == "P" else a.lo(g)
                u_right = b.lo(g)
                if abs(u_left - u_right) > 1e-7:
                    jumps.append(OracleJump(x, u_left, u_right))
                if _is_sonic_value(w_next, b) and abs(g - b.fmax) < 1e-12:
                    state = "P"
            k += 1
        return OracleProfile(pieces, jumps)

    def _uhat_at_right_of(self, x):
        for p in self.uhat:
            if p.x0 <= x < p.x1:
                return p
        return None

    def _run_lower(self, k, x, g, pieces, jumps):
        """Advance an L piece through interval k; returns (state, x, g)."""
        side, w = self.side[k], self.w[k]
        x_end = self.edges[k + 1]
        if _is_sonic_value(w, side):
            y0 = -math.sqrt(max(side.fmax - g, 0.0))
            piece, hit = _integrate(side, w, self.lam, "L", x, x_end, y0, "s")
        else:
            piece, hit = _integrate(side, w, self.lam, "L", x, x_end, g, "g")
        x_shock = self._find_shock(piece)
        if x_shock is not None:
            gs = piece.g(x_shock)
            pieces.append(_Piece(piece.x0, x_shock, "L", side, piece.var, piece.sol, w))
            jumps.append(OracleJump(x_shock, side.lo(gs), side.up(gs)))
            return "U", x_shock, gs
        pieces.append(piece)
        if hit:
            if _is_sonic_value(w, side):
                return "P", piece.x1, side.fmax
            raise OracleFailureError(f"lower branch turns sonic at x = {piece.x1:.6g} with w != sigma")
        return "L", piece.x1, piece.g(piece.x1)

    def _find_shock(self, piece):
        best = None
        for p in self.uhat:
            if p.side is not piece.side:
                continue
            a, b = max(p.x0, piece.x0), min(p.x1, piece.x1)
            if b <= a:
                continue

            def phi(x, p=p):
                return piece.g(x) - p.g(x)

            fa, fb = phi(a), phi(b)
            if fa >= 0.0 and a == p.x0 and a > piece.x0:
                continue  # U-hat starts at a sonic point above the lower piece
            if fa >= 0.0:
                x_s = a
            elif fb >= 0.0:
                x_s = brentq(phi, a, b, xtol=1e-13, rtol=1e-13)
            else:
                continue
            if best is None or x_s < best:
                best = x_s
        return best


def oracle_profile(w_pc: PiecewiseConstant, flux, lam: float, x_lo: float, x_hi: float) -> OracleProfile:
    """Entropy-admissible inviscid resolvent of piecewise-constant w on [x_lo, x_hi]."""
    b = _Builder(w_pc, flux, lam, x_lo, x_hi)
    b.build_uhat()
    return b.build_profile()


def ode_oracle(w_pc: PiecewiseConstant, flux, lam: float, grid: Grid) -> GridFunction:
    """Sample the oracle profile at the cell centres of grid."""
    return oracle_profile(w_pc, flux, lam, grid.x_min, grid.x_max).sample(grid)
