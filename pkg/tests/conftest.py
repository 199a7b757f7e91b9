import numpy as np
from hypothesis import strategies as st

from discflux.grid import GridFunction
from discflux.ode_oracle import PiecewiseConstant


def piecewise(grid, max_pieces=6, support=(-1.5, 1.5)):
    """Hypothesis strategy: piecewise-constant grid functions with values in [0, 1]."""

    @st.composite
    def build(draw):
        k = draw(st.integers(1, max_pieces))
        breaks = draw(st.lists(st.floats(*support), min_size=k + 1, max_size=k + 1, unique=True))
        vals = draw(st.lists(st.floats(0.0, 1.0), min_size=k, max_size=k))
        return PiecewiseConstant(tuple(sorted(breaks)), (0.0, *vals, 0.0)).sample(grid)

    return build()


def smooth_bump(grid, centre=0.0, width=1.0, height=0.8):
    x = (grid.x - centre) / width
    return GridFunction(grid, np.where(np.abs(x) < 1, height * np.cos(0.5 * np.pi * x) ** 2, 0.0))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("]")[1].split(".")[0])):
            terminalreporter.write_line(line)
