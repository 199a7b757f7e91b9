"""Initial data: builtin shapes, the worked examples, and random members of D.

Every generator is deterministic given its arguments; random data always
comes from a caller-supplied seed or numpy Generator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .grid import Grid, GridFunction
from .ode_oracle import PiecewiseConstant

SHAPES = ("step", "bump", "riemann", "zero")


def step(grid: Grid, breaks, values) -> GridFunction:
    """Piecewise constant with zero far field outside [breaks[0], breaks[-1]].

    ``values`` has one entry per interval between consecutive breaks.
    """
    breaks = [float(b) for b in breaks]
    values = [float(v) for v in values]
    if len(values) != len(breaks) - 1:
        raise ParameterError("step needs len(values) == len(breaks) - 1")
    return PiecewiseConstant(breaks, [0.0, *values, 0.0]).sample(grid)


def bump(grid: Grid, centre: float = 0.0, width: float = 1.0, height: float = 1.0) -> GridFunction:
    """Smooth compact bump height * cos^2(pi (x - centre) / (2 width)) on |x - centre| < width."""
    if not width > 0:
        raise ParameterError("bump width must be positive")
    s = (grid.x - centre) / width
    return GridFunction(grid, np.where(np.abs(s) < 1.0, height * np.cos(0.5 * np.pi * s) ** 2, 0.0))


def riemann(grid: Grid, left: float = 1.0, right: float = 0.0, x_cut: float | None = None) -> GridFunction:
    """left for x < 0, right for x > 0, optionally cut to zero beyond |x| > x_cut."""
    v = np.where(grid.x < 0.0, float(left), float(right))
    if x_cut is not None:
        v = np.where(np.abs(grid.x) > x_cut, 0.0, v)
    return GridFunction(grid, v)


def make_shape(grid: Grid, shape: str, **kw) -> GridFunction:
    """Dispatch by name; used by the CLI."""
    if shape == "step":
        return step(grid, kw["breaks"], kw["values"])
    if shape == "bump":
        return bump(grid, **kw)
    if shape == "riemann":
        return riemann(grid, **kw)
    if shape == "zero":
        return GridFunction.zeros(grid)
    raise ParameterError(f"unknown data shape {shape!r}; choose from {SHAPES}")


@dataclass(frozen=True)
class ExampleData:
    """A worked example: piecewise-constant w, flux fixture name and step lam."""

    name: str
    w: PiecewiseConstant
    flux: str
    lam: float


# far field 1/2 on both sides as in the worked examples
EXAMPLES = {
    "case1": ExampleData("case1", PiecewiseConstant((-1.0, 1.0), (0.5, 1.0, 0.5)), "traffic", 0.5),
    "case2": ExampleData("case2", PiecewiseConstant((-1.0, 0.0, 0.5), (0.5, 1.0, 0.25, 0.5)), "traffic", 0.5),
    "case3": ExampleData("case3", PiecewiseConstant((-1.0, 0.0, 1.0), (0.5, 0.25, 1.0, 0.5)), "traffic", 0.5),
    "ex72": ExampleData("ex72", PiecewiseConstant((-1.0, 0.0, 1.0), (0.5, 0.4, 0.7, 0.5)), "traffic_jump", 0.5),
}


def get_example(name: str) -> ExampleData:
    try:
        return EXAMPLES[name]
    except KeyError:
        raise ParameterError(f"unknown example {name!r}; choose from {sorted(EXAMPLES)}") from None


def random_piecewise_constant(rng, max_pieces: int = 8, support=(-2.0, 2.0)) -> PiecewiseConstant:
    """Random w in D: 1..max_pieces constant pieces with values in [0, 1) on ``support``.

    Breaks are uniform on the support, zero far field on both sides.
    ``rng`` may be a seed or a numpy Generator.
    """
    rng = np.random.default_rng(rng)
    k = int(rng.integers(1, max_pieces + 1))
    breaks = np.sort(rng.uniform(support[0], support[1], k + 1))
    values = rng.uniform(0.0, 1.0, k)
    return PiecewiseConstant(tuple(breaks), (0.0, *values, 0.0))


def random_pairs(seed: int, n: int, grid: Grid, max_pieces: int = 8, support=(-2.0, 2.0)):
    """n pairs (w1, w2) of random piecewise-constant grid functions in D."""
    rng = np.random.default_rng(seed)
    return [
        (random_piecewise_constant(rng, max_pieces, support).sample(grid),
         random_piecewise_constant(rng, max_pieces, support).sample(grid))
        for _ in range(n)
    ]
