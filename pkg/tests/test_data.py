import numpy as np
import pytest

from discflux.data import (
    EXAMPLES,
    bump,
    get_example,
    make_shape,
    random_pairs,
    random_piecewise_constant,
    riemann,
    step,
)
from discflux.errors import ParameterError
from discflux.grid import Grid

GRID = Grid.from_spacing(-3.0, 3.0, 0.01)


def test_step_has_zero_far_field():
    u = step(GRID, [-1.0, 0.0, 1.0], [0.2, 0.7])
    assert u.values[0] == 0.0 and u.values[-1] == 0.0
    assert u.mass() == pytest.approx(0.9)


def test_bump_and_riemann():
    b = bump(GRID, 0.0, 1.0, 0.8)
    assert b.values.max() == pytest.approx(0.8, abs=1e-3)
    assert b.mass() == pytest.approx(0.8, abs=1e-3)  # cos^2 bump of half-width 1
    r = riemann(GRID, 0.4, 0.7, x_cut=2.0)
    assert r.values[GRID.n_left - 1] == 0.4 and r.values[GRID.n_left] == 0.7
    assert r.values[0] == 0.0


def test_make_shape_dispatch():
    assert np.all(make_shape(GRID, "zero").values == 0)
    with pytest.raises(ParameterError):
        make_shape(GRID, "triangle")


def test_examples_registry():
    assert set(EXAMPLES) == {"case1", "case2", "case3", "ex72"}
    assert get_example("ex72").flux == "traffic_jump"
    with pytest.raises(ParameterError):
        get_example("case9")


def test_random_data_is_reproducible_and_in_range():
    a = random_piecewise_constant(7)
    b = random_piecewise_constant(7)
    assert a == b
    assert all(0 <= v < 1 for v in a.values)
    assert a.values[0] == a.values[-1] == 0.0
    assert len(a.values) - 2 <= 8
    pairs = random_pairs(3, 4, GRID)
    assert len(pairs) == 4
    assert np.array_equal(pairs[0][0].values, random_pairs(3, 4, GRID)[0][0].values)
