import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import piecewise

from discflux.errors import GridError, ParameterError, ShapeError
from discflux.grid import (
    Grid,
    GridFunction,
    diffusion_coefficient,
    exp_convolve,
    exp_convolve_dx,
    l1_distance,
    l1_norm,
    read_csv,
    total_variation,
    write_csv,
)


def dense_kernel_matrix(n, h, a):
    """Direct inverse of the three-point operator, no recursion."""
    g = diffusion_coefficient(h, a)
    M = (1 + 2 * g) * np.eye(n) - g * (np.eye(n, k=1) + np.eye(n, k=-1))
    return np.linalg.inv(M)


def indicator(grid, lo, hi):
    return GridFunction(grid, np.where((grid.x > lo) & (grid.x < hi), 1.0, 0.0))


def test_grid_rejects_missing_origin_face():
    with pytest.raises(GridError):
        Grid(-1.0, 1.0, 3)
    with pytest.raises(GridError):
        Grid(0.5, 1.0, 10)


def test_from_spacing_puts_face_at_zero():
    g = Grid.from_spacing(-1.03, 2.0, 0.1)
    assert g.n_left == 11
    assert np.isclose(g.x[g.n_left] - g.h / 2, 0.0)
    assert np.allclose(g.x, -g.x[::-1] + (g.x[0] + g.x[-1]))


def test_shape_and_finite_checks():
    g = Grid(-1.0, 1.0, 4)
    with pytest.raises(ShapeError):
        GridFunction(g, np.zeros(3))
    with pytest.raises(ParameterError):
        GridFunction(g, [0, np.nan, 0, 0])


def test_norm_and_variation_examples():
    g = Grid(-2.0, 2.0, 400)
    f = indicator(g, -1.0, 1.0)
    assert l1_norm(f) == pytest.approx(2.0)
    assert total_variation(f) == pytest.approx(2.0)
    half = indicator(g, -1.0, 1.0).scaled(0.5)
    assert l1_distance(f, half) == pytest.approx(1.0)
    # w of the first traffic example: 1/2, 1 on (-1, 1), 1/2
    w = GridFunction(g, np.where(np.abs(g.x) < 1, 1.0, 0.5))
    assert total_variation(w) == pytest.approx(1.0)


def test_dirichlet_kernel_matches_dense_inverse():
    g = Grid(-2.0, 2.0, 800)
    rng = np.random.default_rng(1)
    f = GridFunction(g, rng.uniform(size=g.n_cells))
    a = 0.05
    Minv = dense_kernel_matrix(g.n_cells, g.h, a)
    got = exp_convolve(f, a).values
    want = Minv @ f.values
    assert np.max(np.abs(got - want)) <= 1e-12 * np.max(np.abs(want))
    D = (np.eye(g.n_cells, k=1) - np.eye(g.n_cells, k=-1)) / (2 * g.h)
    got_dx = exp_convolve_dx(f, a).values
    want_dx = Minv @ (D @ f.values)
    assert np.max(np.abs(got_dx - want_dx)) <= 1e-12 * np.max(np.abs(want_dx))


def test_convolution_of_indicator_matches_closed_form():
    # (K_a * 1_[-1,1])(x) = 1 - exp(-1/a) cosh(x/a) inside; exp(-|x|/a) sinh(1/a) outside
    g = Grid.from_spacing(-4.0, 4.0, 1e-3)
    a = 0.5
    f = indicator(g, -1.0, 1.0)
    c = exp_convolve(f, a)
    i0 = np.argmin(np.abs(g.x - 0.0005))
    assert c.values[i0] == pytest.approx(1 - np.exp(-2.0), abs=5e-3)  # 0.8647
    i15 = np.argmin(np.abs(g.x - 1.5005))
    assert c.values[i15] == pytest.approx(0.5 * (np.exp(-1.0) - np.exp(-5.0)), abs=5e-3)  # 0.1806
    # derivative at 1.5 is K_a(2.5) - K_a(0.5) = exp(-5) - exp(-1)
    d = exp_convolve_dx(f, a)
    assert d.values[i15] == pytest.approx(np.exp(-5.0) - np.exp(-1.0), abs=5e-3)  # -0.3611


def test_kernel_has_mass_one_away_from_edges():
    g = Grid.from_spacing(-5.0, 5.0, 1e-2)
    spike = np.zeros(g.n_cells)
    spike[g.n_left] = 1.0 / g.h
    c = exp_convolve(GridFunction(g, spike), 0.3)
    # Dirichlet ends lose about exp(-5/0.3) of the mass
    assert c.mass() == pytest.approx(1.0, abs=1e-6)
    assert np.all(c.values > 0)


def test_constant_input_returns_one_in_the_interior():
    g = Grid.from_spacing(-5.0, 5.0, 1e-2)
    c = exp_convolve(GridFunction(g, np.ones(g.n_cells)), 0.1)
    inside = np.abs(g.x) < 1.0
    assert np.max(np.abs(c.values[inside] - 1.0)) <= 1e-14


def test_csv_round_trip(tmp_path):
    g = Grid(-1.0, 1.0, 10)
    f = GridFunction(g, np.linspace(0, 1, 10) / 3.0)
    write_csv(f, tmp_path / "u.csv")
    back = read_csv(tmp_path / "u.csv")
    assert back.grid.same_as(g)
    assert np.array_equal(back.values, f.values)


GRID = Grid(-2.0, 2.0, 200)
values = piecewise(GRID)


@settings(max_examples=50, deadline=None)
@given(values, values, values)
def test_l1_triangle_inequality(f, g, k):
    assert l1_distance(f, k) <= l1_distance(f, g) + l1_distance(g, k) + 1e-12


@settings(max_examples=50, deadline=None)
@given(values, st.floats(0.01, 1.0))
def test_convolution_keeps_values_in_unit_interval(f, a):
    c = exp_convolve(f, a).values
    assert c.min() >= -1e-14 and c.max() <= 1 + 1e-14
    # convolution never increases L1 norm or total variation
    assert l1_norm(exp_convolve(f, a)) <= l1_norm(f) + 1e-12
    assert total_variation(exp_convolve(f, a)) <= total_variation(f) + 1e-12
