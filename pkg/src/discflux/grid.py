"""Uniform cell-centred grids on a truncated real line.

The line is cut to [x_min, x_max] and split into cells of width h with one
cell face pinned at x = 0, so cells left of the origin only ever see the left
flux and cells right of it the right flux.  Outside the grid every function is
taken to be zero.

The exponential convolutions K_a * f and K_a' * f that drive the viscous
fixed-point map are evaluated in O(N) with one causal and one anticausal
first-order recursion plus a rank-one boundary correction.  In the interior
the discrete kernel is k_m = c q^|m| with c = (1-q)/(1+q) (unit mass) and the
derivative kernel is the centred difference of k.  The per-cell decay is
q = exp(-2 asinh(h/2a)) = exp(-h/a) (1 + O(h^3/a^3)), which makes k the exact
Green's function of the three-point operator

    (M u)_i = (1 + 2g) u_i - g (u_{i-1} + u_{i+1}),   g = (a/h)^2,

and near the ends the kernel is the Green's function of M with u = 0 outside
the grid.  So K_a * f = M^{-1} f and K_a' * f = M^{-1} D f with D the centred
difference, and because g scales exactly with a^2 = lam*eps the discrete
resolvents for different lam are resolvents of a single discrete operator.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .errors import GridError, ParameterError, ShapeError


@dataclass(frozen=True)
class Grid:
    """Cells of width h covering [x_min, x_max] with a face at x = 0."""

    x_min: float
    x_max: float
    n_cells: int

    def __post_init__(self):
        if not (self.x_min < 0.0 < self.x_max):
            raise GridError(f"need x_min < 0 < x_max, got [{self.x_min}, {self.x_max}]")
        if int(self.n_cells) != self.n_cells or self.n_cells < 2:
            raise GridError(f"n_cells must be an integer >= 2, got {self.n_cells}")
        object.__setattr__(self, "n_cells", int(self.n_cells))
        h = self.h
        n_left = round(-self.x_min / h)
        if abs(self.x_min + n_left * h) > 1e-9 * h:
            raise GridError(
                f"no cell face at x=0: x_min + n_left*h = {self.x_min + n_left * h:.3e}"
            )
        if not 0 < n_left < self.n_cells:
            raise GridError("x = 0 must be an interior face")

    @classmethod
    def from_spacing(cls, x_min: float, x_max: float, h: float) -> "Grid":
        """Smallest grid with spacing h that covers [x_min, x_max].

        The end points are pushed outwards to whole multiples of h so the
        face at zero is exact.
        """
        if h <= 0:
            raise ParameterError("h must be positive")
        n_left = math.ceil(-x_min / h - 1e-9)
        n_right = math.ceil(x_max / h - 1e-9)
        return cls(-n_left * h, n_right * h, n_left + n_right)

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def n_left(self) -> int:
        """Number of cells left of the origin."""
        return round(-self.x_min / self.h)

    @property
    def x(self) -> np.ndarray:
        """Cell centres, symmetric about the face at zero."""
        return (np.arange(self.n_cells) - self.n_left + 0.5) * self.h

    @property
    def left_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_cells, dtype=bool)
        mask[: self.n_left] = True
        return mask

    def same_as(self, other: "Grid") -> bool:
        return self.n_cells == other.n_cells and np.isclose(
            self.x_min, other.x_min, rtol=0, atol=1e-12 * self.h
        ) and np.isclose(self.x_max, other.x_max, rtol=0, atol=1e-12 * self.h)


@dataclass(frozen=True)
class GridFunction:
    """Cell values of a real function on a Grid."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.n_cells,):
            raise ShapeError(
                f"expected {self.grid.n_cells} values, got shape {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise ParameterError("grid function values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, grid: Grid, func) -> "GridFunction":
        return cls(grid, np.asarray(func(grid.x), dtype=float) * np.ones(grid.n_cells))

    @classmethod
    def zeros(cls, grid: Grid) -> "GridFunction":
        return cls(grid, np.zeros(grid.n_cells))

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.grid, values)

    def mass(self) -> float:
        return float(self.grid.h * np.sum(self.values))

    def _check(self, other: "GridFunction"):
        if not self.grid.same_as(other.grid):
            raise ShapeError("grid functions live on different grids")

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        self._check(other)
        return GridFunction(self.grid, self.values - other.values)

    def __add__(self, other: "GridFunction") -> "GridFunction":
        self._check(other)
        return GridFunction(self.grid, self.values + other.values)

    def scaled(self, s: float) -> "GridFunction":
        return GridFunction(self.grid, s * self.values)


def l1_norm(f: GridFunction) -> float:
    """h * sum |f_i|."""
    return float(f.grid.h * np.sum(np.abs(f.values)))


def l1_distance(f: GridFunction, g: GridFunction) -> float:
    return l1_norm(f - g)


def total_variation(f: GridFunction) -> float:
    """sum |f_{i+1} - f_i| over the cell values (no reconstruction)."""
    return float(np.sum(np.abs(np.diff(f.values))))


def _decay(h: float, a: float) -> tuple[float, float]:
    """Per-cell decay q and 1 - q (computed without cancellation).

    q solves q/(1-q)^2 = (a/h)^2, i.e. q = exp(-2 asinh(h/(2a))).
    """
    if not a > 0:
        raise ParameterError(f"kernel width a must be positive, got {a}")
    s = 2.0 * math.asinh(h / (2.0 * a))
    return math.exp(-s), -math.expm1(-s)


def exp_kernel_weights(h: float, a: float) -> tuple[float, float, float]:
    """Return (q, c, g): interior kernel k_m = c q^|m| inverting M with coefficient g."""
    q, one_minus_q = _decay(h, a)
    return q, one_minus_q / (1.0 + q), (a / h) ** 2


def diffusion_coefficient(h: float, a: float) -> float:
    """g = q/(1-q)^2 = (a/h)^2, the three-point coefficient the kernel inverts."""
    return (a / h) ** 2


def _solve_three_point(b: np.ndarray, h: float, a: float) -> np.ndarray:
    """Solve (1 + 2g) x_i - g (x_{i-1} + x_{i+1}) = b_i with x = 0 off the grid.

    M = (g/q) [(I - qS)(I - qS^T) + q^2 e_0 e_0^T] with S the down shift, so a
    causal and an anticausal pass (lfilter) plus a Sherman-Morrison update give
    the exact inverse.
    """
    q, one_minus_q = _decay(h, a)
    n = len(b)
    y = lfilter([1.0], [1.0, -q], b)
    x = lfilter([1.0], [1.0, -q], y[::-1])[::-1]
    one_minus_q2 = one_minus_q * (1.0 + q)
    i = np.arange(n, dtype=float)
    with np.errstate(under="ignore"):
        z = (q**i - q ** (2.0 * n - i)) / one_minus_q2
        z0 = (1.0 - q ** (2.0 * n)) / one_minus_q2
    x = x - (q * q * x[0] / (1.0 + q * q * z0)) * z
    return one_minus_q**2 * x


def _centred_difference(v: np.ndarray, h: float) -> np.ndarray:
    d = np.empty_like(v, dtype=float)
    d[1:-1] = v[2:] - v[:-2]
    d[0] = v[1]
    d[-1] = -v[-2]
    return d / (2.0 * h)


def _convolve_values(v: np.ndarray, h: float, a: float) -> np.ndarray:
    return _solve_three_point(np.asarray(v, dtype=float), h, a)


def _convolve_dx_values(v: np.ndarray, h: float, a: float) -> np.ndarray:
    return _solve_three_point(_centred_difference(np.asarray(v, dtype=float), h), h, a)


def exp_convolve(f: GridFunction, a: float) -> GridFunction:
    """K_a * f with K_a(x) = exp(-|x|/a)/(2a); u = 0 outside the grid."""
    return GridFunction(f.grid, _convolve_values(f.values, f.grid.h, a))


def exp_convolve_dx(f: GridFunction, a: float) -> GridFunction:
    """K_a' * f with K_a'(x) = -sign(x) K_a(x)/a (centred difference of the kernel)."""
    return GridFunction(f.grid, _convolve_dx_values(f.values, f.grid.h, a))


def write_csv(f: GridFunction, path) -> None:
    """Write ``x,value`` rows with 17 significant digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["x", "value"])
        for xi, vi in zip(f.grid.x, f.values):
            writer.writerow([f"{xi:.17g}", f"{vi:.17g}"])


def read_csv(path, grid: Grid | None = None) -> GridFunction:
    """Read a profile written by write_csv.

    Without a grid the grid is rebuilt from the cell centres, which must be
    uniform with a face at zero.  With a grid the samples are interpolated
    linearly onto its cell centres (zero outside the sampled range).
    """
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    x, v = data[:, 0], data[:, 1]
    if grid is None:
        h = float(np.mean(np.diff(x)))
        if not np.allclose(np.diff(x), h, rtol=1e-9, atol=1e-12):
            raise GridError("CSV cell centres are not uniform")
        grid = Grid(float(x[0] - h / 2), float(x[-1] + h / 2), len(x))
        return GridFunction(grid, v)
    return GridFunction(grid, np.interp(grid.x, x, v, left=0.0, right=0.0))
