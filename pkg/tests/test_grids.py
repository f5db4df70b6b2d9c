import numpy as np
import pytest

from fpcurv.errors import GridFoldError
from fpcurv.grids import (
    from_coords,
    generate_cylinder_grid,
    generate_random_grid,
    generate_random_grid_3d,
    generate_wavy_grid,
    load_grid,
    save_grid,
)

PAPER_DOMAIN = (-10.0, 10.0, -10.0, 10.0)


def paper_wavy(ghost=6):
    return generate_wavy_grid(21, 21, PAPER_DOMAIN, amp_x=0.6, amp_y=0.6,
                              n_xy=8, n_yx=8, ghost=ghost)


def test_wavy_zero_amplitude_is_cartesian():
    g = generate_wavy_grid(11, 9, (0.0, 1.0, 0.0, 2.0), amp_x=0.0, amp_y=0.0, ghost=4)
    xi = g.interior(g.x)
    yi = g.interior(g.y)
    assert np.allclose(xi, np.linspace(0, 1, 11)[:, None], atol=1e-15)
    assert np.allclose(yi, np.linspace(0, 2, 9)[None, :], atol=1e-15)


def test_wavy_paper_first_node():
    g = paper_wavy()
    assert g.interior(g.x)[0, 0] == pytest.approx(-10.0, abs=1e-14)
    assert g.interior(g.y)[0, 0] == pytest.approx(-10.0, abs=1e-14)


def test_wavy_paper_row_with_full_phase():
    # at j = 6 (1-based) the x-phase is 8*pi*5*1/20 = 2*pi, so x = -10 + i exactly
    g = paper_wavy()
    x_row = g.interior(g.x)[:, 5]
    expected = -10.0 + np.arange(21.0) + 0.6 * np.sin(8.0 * np.pi * 5.0 * 1.0 / 20.0)
    assert np.allclose(x_row, expected, atol=1e-14)
    assert np.allclose(x_row, -10.0 + np.arange(21.0), atol=1e-14)


def test_wavy_ghost_coordinates_are_periodic_images():
    g = paper_wavy()
    # index period 20 in each direction, physical period 20
    assert np.allclose(g.x[g.ghost - 1, :], g.x[g.ghost + 19, :] - 20.0, atol=1e-12)
    assert np.allclose(g.y[:, g.ghost - 1], g.y[:, g.ghost + 19] - 20.0, atol=1e-12)
    assert g.periodic == (True, True)


def test_random_zero_fraction_is_cartesian():
    g = generate_random_grid(9, 9, (0.0, 1.0, 0.0, 1.0), 0.0, seed=3, ghost=4)
    assert np.allclose(g.interior(g.x), np.linspace(0, 1, 9)[:, None], atol=1e-15)


def test_random_grid_deterministic():
    a = generate_random_grid(15, 13, PAPER_DOMAIN, 0.2, seed=42, ghost=5)
    b = generate_random_grid(15, 13, PAPER_DOMAIN, 0.2, seed=42, ghost=5)
    assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)
    c = generate_random_grid(15, 13, PAPER_DOMAIN, 0.2, seed=43, ghost=5)
    assert not np.array_equal(a.x, c.x)


def test_random_grid_displacement_bound():
    nx = ny = 21
    g = generate_random_grid(nx, ny, PAPER_DOMAIN, 0.2, seed=1, ghost=4)
    dx0 = 20.0 / (nx - 1)
    ii, jj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    disp = np.hypot(g.interior(g.x) - (-10.0 + dx0 * ii), g.interior(g.y) - (-10.0 + dx0 * jj))
    assert np.max(disp) <= 0.2 * dx0 + 1e-12
    # boundary nodes stay put
    assert np.max(disp[0, :]) == 0.0 and np.max(disp[:, -1]) == 0.0


def test_random_grid_fraction_validation():
    with pytest.raises(ValueError):
        generate_random_grid(9, 9, PAPER_DOMAIN, 0.6, seed=0)


def test_cylinder_wall_row_on_unit_circle():
    g = generate_cylinder_grid(21, 17, perturb=0.0, ghost=4)
    xw = g.interior(g.x)[:, -1]
    yw = g.interior(g.y)[:, -1]
    assert np.allclose(np.hypot(xw, yw), 1.0, atol=1e-13)


def test_cylinder_midpoint_on_symmetry_line():
    # odd imax puts the middle node at xi' = 1/2 -> angle 0 -> positive x axis
    g = generate_cylinder_grid(21, 17, perturb=0.0, ghost=4)
    mid = 10
    assert g.interior(g.y)[mid, :] == pytest.approx(0.0, abs=1e-14)
    assert np.all(g.interior(g.x)[mid, :] > 0.0)


def test_cylinder_paper_parameters_and_determinism():
    g = generate_cylinder_grid(61, 81, rx=3.0, ry=6.0, theta=5 * np.pi / 12,
                               perturb=0.2, seed=11, ghost=5)
    assert g.dims == (61, 81)
    h = generate_cylinder_grid(61, 81, rx=3.0, ry=6.0, theta=5 * np.pi / 12,
                               perturb=0.2, seed=11, ghost=5)
    assert np.array_equal(g.x, h.x)
    # outer boundary close to the ellipse (perturbation only moves it slightly)
    router = np.hypot(g.interior(g.x)[:, 0] / 3.0, g.interior(g.y)[:, 0] / 6.0)
    assert np.all(np.abs(router - 1.0) < 0.02)


def test_folded_wavy_grid_raises_with_cell():
    with pytest.raises(GridFoldError):
        generate_wavy_grid(21, 21, PAPER_DOMAIN, amp_x=3.0, amp_y=3.0, ghost=4)


def test_random_3d_deterministic_and_bounded():
    g = generate_random_grid_3d(7, 7, 7, amplitude_fraction=0.2, seed=5, ghost=4)
    h = generate_random_grid_3d(7, 7, 7, amplitude_fraction=0.2, seed=5, ghost=4)
    assert all(np.array_equal(a, b) for a, b in zip(g.coords, h.coords))
    d0 = 1.0 / 6.0
    lattice = [np.linspace(0, 1, 7)] * 3
    mesh = np.meshgrid(*lattice, indexing="ij")
    disp = np.sqrt(sum((g.interior(c) - m) ** 2 for c, m in zip(g.coords, mesh)))
    assert np.max(disp) <= 0.2 * d0 + 1e-12


def test_grid_text_roundtrip(tmp_path):
    g = generate_random_grid(9, 7, (0.0, 2.0, 0.0, 1.0), 0.15, seed=9, ghost=4)
    path = tmp_path / "grid.txt"
    save_grid(g, path)
    h = load_grid(path)
    assert h.dims == g.dims and h.ghost == g.ghost and h.periodic == g.periodic
    assert np.array_equal(g.x, h.x) and np.array_equal(g.y, h.y)


def test_from_coords_extrapolated_ghosts_linear_grid():
    x, y = np.meshgrid(np.linspace(0, 1, 9), np.linspace(0, 1, 9), indexing="ij")
    g = from_coords([x, y], ghost=3, order=6)
    # cubic extrapolation reproduces the affine map exactly
    dx = 1.0 / 8.0
    assert g.x[0, 3] == pytest.approx(-3 * dx, abs=1e-12)
    assert g.y[3, 0] == pytest.approx(-3 * dx, abs=1e-12)
