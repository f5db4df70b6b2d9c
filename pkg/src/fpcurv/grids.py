"""Structured curvilinear test grids with ghost layers.

Grids are node-based: the solution lives on the nodes, the computational
coordinates are the integer indices with unit spacing, and every array is
padded with ``ghost`` layers per side.  Generator-backed grids populate the
ghost coordinates by evaluating their defining formula at ghost indices
(for the wavy grid this coincides with the periodic wrap); imported grids
fall back to polynomial extrapolation along index lines.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import StencilError

DEFAULT_GHOST = 9  # supports WENO7 windows with 8th-order metrics


@dataclass
class Grid:
    """Node coordinates of a structured grid, padded with ghost layers.

    coords : one padded ndarray per physical axis, shape dims + 2*ghost
    dims   : interior node counts per axis
    ghost  : pad layers per side
    periodic : whether each index direction closes on itself
    meta   : provenance (generator name, rng id, parameters)
    """

    coords: tuple
    dims: tuple
    ghost: int
    periodic: tuple
    meta: dict = field(default_factory=dict)

    @property
    def ndim(self):
        return len(self.dims)

    def interior(self, arr):
        """View of a padded array restricted to interior nodes."""
        sl = tuple(slice(self.ghost, self.ghost + n) for n in self.dims)
        return arr[sl]

    @property
    def x(self):
        return self.coords[0]

    @property
    def y(self):
        return self.coords[1]

    def validate(self):
        for n in self.dims:
            if n < 2:
                raise ValueError(f"grid needs at least 2 nodes per direction, got dims={self.dims}")
        for c in self.coords:
            if not np.all(np.isfinite(c)):
                raise ValueError("grid coordinates contain non-finite values")
        for ax in range(self.ndim):
            d2 = np.zeros_like(self.interior(self.coords[0]))
            for c in self.coords:
                ci = self.interior(c)
                d2 = d2 + np.diff(ci, axis=ax, append=np.take(ci, [-1], axis=ax)) ** 2
            # last slot duplicates itself; ignore it
            d2 = np.moveaxis(d2, ax, -1)[..., :-1]
            if d2.size and np.min(d2) == 0.0:
                raise ValueError(f"adjacent nodes coincide along axis {ax}")
        return self


def _index_grids(dims, ghost):
    """Integer index arrays (0-based interior) including ghost indices."""
    axes = [np.arange(-ghost, n + ghost, dtype=np.float64) for n in dims]
    return np.meshgrid(*axes, indexing="ij")


def check_fold(grid, order=2):
    """Raise GridFoldError if any interior cell volume 1/J is nonpositive.

    Uses the conservative metric evaluation at the given order; the first
    offending interior cell is named in the error.
    """
    from .metrics import compute_metrics_scmm  # deferred: metrics imports this module

    compute_metrics_scmm(grid, order, _fold_check_interior_only=True)
    return grid


def generate_wavy_grid(nx, ny, domain=(-10.0, 10.0, -10.0, 10.0), amp_x=0.6, amp_y=0.6,
                       n_xy=8, n_yx=8, ghost=DEFAULT_GHOST):
    """Sinusoidally perturbed Cartesian grid.

    Node (i, j), 0-based:
        x = xmin + dx0 * i + amp_x * sin(n_xy * pi * j * dy0 / Ly)
        y = ymin + dy0 * j + amp_y * sin(n_yx * pi * i * dx0 / Lx)

    amp_x/amp_y are physical amplitude lengths.  The grid is index-periodic
    when the wavenumbers are even (true for the default n = 8 benchmark
    configuration).
    """
    if nx < 2 or ny < 2:
        raise ValueError("wavy grid needs nx, ny >= 2")
    xmin, xmax, ymin, ymax = map(float, domain)
    lx, ly = xmax - xmin, ymax - ymin
    dx0, dy0 = lx / (nx - 1), ly / (ny - 1)
    ii, jj = _index_grids((nx, ny), ghost)
    x = xmin + dx0 * ii + amp_x * np.sin(n_xy * np.pi * jj * dy0 / ly)
    y = ymin + dy0 * jj + amp_y * np.sin(n_yx * np.pi * ii * dx0 / lx)
    grid = Grid(
        coords=(x, y), dims=(nx, ny), ghost=ghost,
        periodic=(n_yx % 2 == 0, n_xy % 2 == 0),
        meta={"generator": "wavy", "domain": (xmin, xmax, ymin, ymax),
              "amp": (amp_x, amp_y), "wavenumbers": (n_xy, n_yx)},
    ).validate()
    return check_fold(grid)


def generate_random_grid(nx, ny, domain=(-10.0, 10.0, -10.0, 10.0), amplitude_fraction=0.2,
                         seed=0, ghost=DEFAULT_GHOST):
    """Cartesian grid with interior nodes kicked in a uniformly random direction.

    Displacement magnitude is amplitude_fraction * min(dx0, dy0); boundary
    nodes and ghost nodes stay on the unperturbed lattice.  Deterministic
    for a given seed (PCG64).
    """
    if not 0.0 <= amplitude_fraction < 0.5:
        raise ValueError("amplitude_fraction must satisfy 0 <= f < 0.5 (fold safety)")
    xmin, xmax, ymin, ymax = map(float, domain)
    dx0, dy0 = (xmax - xmin) / (nx - 1), (ymax - ymin) / (ny - 1)
    ii, jj = _index_grids((nx, ny), ghost)
    x = xmin + dx0 * ii
    y = ymin + dy0 * jj
    rng = np.random.Generator(np.random.PCG64(seed))
    theta = rng.uniform(0.0, 2.0 * np.pi, size=(nx - 2, ny - 2))
    r = amplitude_fraction * min(dx0, dy0)
    sl = (slice(ghost + 1, ghost + nx - 1), slice(ghost + 1, ghost + ny - 1))
    x[sl] += r * np.cos(theta)
    y[sl] += r * np.sin(theta)
    grid = Grid(
        coords=(x, y), dims=(nx, ny), ghost=ghost, periodic=(False, False),
        meta={"generator": "random", "rng": "pcg64", "seed": int(seed),
              "amplitude_fraction": amplitude_fraction,
              "domain": (xmin, xmax, ymin, ymax)},
    ).validate()
    return check_fold(grid)


def generate_random_grid_3d(nx, ny, nz, domain=(0.0, 1.0, 0.0, 1.0, 0.0, 1.0),
                            amplitude_fraction=0.2, seed=0, ghost=6):
    """3D analogue of generate_random_grid (isotropic random directions)."""
    if not 0.0 <= amplitude_fraction < 0.5:
        raise ValueError("amplitude_fraction must satisfy 0 <= f < 0.5 (fold safety)")
    xmin, xmax, ymin, ymax, zmin, zmax = map(float, domain)
    dx0 = (xmax - xmin) / (nx - 1)
    dy0 = (ymax - ymin) / (ny - 1)
    dz0 = (zmax - zmin) / (nz - 1)
    ii, jj, kk = _index_grids((nx, ny, nz), ghost)
    x = xmin + dx0 * ii
    y = ymin + dy0 * jj
    z = zmin + dz0 * kk
    rng = np.random.Generator(np.random.PCG64(seed))
    vec = rng.standard_normal(size=(3, nx - 2, ny - 2, nz - 2))
    vec /= np.sqrt(np.sum(vec**2, axis=0))
    r = amplitude_fraction * min(dx0, dy0, dz0)
    sl = tuple(slice(ghost + 1, ghost + n - 1) for n in (nx, ny, nz))
    x[sl] += r * vec[0]
    y[sl] += r * vec[1]
    z[sl] += r * vec[2]
    return Grid(
        coords=(x, y, z), dims=(nx, ny, nz), ghost=ghost, periodic=(False,) * 3,
        meta={"generator": "random3d", "rng": "pcg64", "seed": int(seed),
              "amplitude_fraction": amplitude_fraction},
    ).validate()


def generate_cylinder_grid(imax=61, jmax=81, rx=3.0, ry=6.0, theta=5.0 * np.pi / 12.0,
                           perturb=0.2, seed=0, ghost=DEFAULT_GHOST):
    """Polar-like grid between an outer ellipse (rx, ry) and the unit cylinder.

    With 1-based indices I, J and per-node phi ~ U(0, 1):
        xi  = I + perturb * phi,         xi'  = (xi - 1) / (imax - 1)
        eta = J + perturb * sqrt(1-phi^2), eta' = (eta - 1) / (jmax - 1)
        x = (rx - (rx - 1) eta') cos(theta (2 xi' - 1))
        y = (ry - (ry - 1) eta') sin(theta (2 xi' - 1))

    eta' = 1 is the cylinder surface, eta' = 0 the outer boundary; the xi
    ends are the +-theta lips.
    """
    if imax < 2 or jmax < 2:
        raise ValueError("cylinder grid needs imax, jmax >= 2")
    if rx <= 1.0 or ry <= 1.0:
        raise ValueError("outer radii must exceed the unit cylinder")
    ii, jj = _index_grids((imax, jmax), ghost)
    rng = np.random.Generator(np.random.PCG64(seed))
    if perturb:
        phi = rng.random(size=ii.shape)
    else:
        phi = np.zeros_like(ii)
    xi = (ii + 1.0) + perturb * phi
    eta = (jj + 1.0) + perturb * np.sqrt(1.0 - phi**2)
    xip = (xi - 1.0) / (imax - 1.0)
    etap = (eta - 1.0) / (jmax - 1.0)
    ang = theta * (2.0 * xip - 1.0)
    x = (rx - (rx - 1.0) * etap) * np.cos(ang)
    y = (ry - (ry - 1.0) * etap) * np.sin(ang)
    grid = Grid(
        coords=(x, y), dims=(imax, jmax), ghost=ghost, periodic=(False, False),
        meta={"generator": "cylinder", "rng": "pcg64", "seed": int(seed),
              "rx": rx, "ry": ry, "theta": theta, "perturb": perturb},
    ).validate()
    return check_fold(grid)


def _extrapolation_weights(degree):
    """One-step Lagrange extrapolation of nodes 0..degree to node -1."""
    pts = np.arange(degree + 1, dtype=np.float64)
    w = np.empty(degree + 1)
    for k in range(degree + 1):
        others = np.delete(pts, k)
        w[k] = np.prod((-1.0 - others) / (pts[k] - others))
    return w


def from_coords(coord_arrays, ghost, order=6, periodic=None, period=None):
    """Wrap interior coordinate arrays in a Grid, populating ghost layers.

    Periodic directions wrap with the physical translation ``period``;
    the rest extrapolate each index line with a polynomial of degree
    min(order - 1, 3), applied one layer at a time.
    """
    coord_arrays = [np.asarray(c, dtype=np.float64) for c in coord_arrays]
    dims = coord_arrays[0].shape
    ndim = len(dims)
    periodic = tuple(periodic) if periodic is not None else (False,) * ndim
    degree = min(order - 1, 3)
    w = _extrapolation_weights(degree)
    padded = []
    for c in coord_arrays:
        p = np.full(tuple(n + 2 * ghost for n in dims), np.nan)
        p[tuple(slice(ghost, ghost + n) for n in dims)] = c
        padded.append(p)
    for ax in range(ndim):
        n = dims[ax]
        if n < degree + 1 and not periodic[ax]:
            raise StencilError(f"axis {ax} too short for degree-{degree} ghost extrapolation")
        for ci, p in enumerate(padded):
            pm = np.moveaxis(p, ax, 0)
            filled = slice(ghost, ghost + n)
            if periodic[ax]:
                shift = 0.0 if period is None else period[ci][ax]
                for g in range(1, ghost + 1):
                    pm[ghost - g] = pm[ghost + n - 1 - g] - shift
                    pm[ghost + n - 1 + g] = pm[ghost + g] + shift
            else:
                for g in range(ghost - 1, -1, -1):
                    pm[g] = sum(w[k] * pm[g + 1 + k] for k in range(degree + 1))
                    hi = 2 * ghost + n - 1 - g
                    pm[hi] = sum(w[k] * pm[hi - 1 - k] for k in range(degree + 1))
    return Grid(coords=tuple(padded), dims=tuple(dims), ghost=ghost, periodic=periodic,
                meta={"generator": "imported"}).validate()


def save_grid(grid, path):
    """Plain-text grid format: header (dims, ghost, periodic), then node rows."""
    with open(path, "w") as fh:
        fh.write("fpcurv-grid 1\n")
        fh.write(f"ndim {grid.ndim}\n")
        fh.write("dims " + " ".join(str(n) for n in grid.dims) + "\n")
        fh.write(f"ghost {grid.ghost}\n")
        fh.write("periodic " + " ".join("1" if p else "0" for p in grid.periodic) + "\n")
        flat = [c.reshape(-1) for c in grid.coords]
        for row in zip(*flat):
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def load_grid(path):
    with open(path) as fh:
        magic = fh.readline().split()
        if not magic or magic[0] != "fpcurv-grid":
            raise ValueError(f"{path} is not an fpcurv grid file")
        ndim = int(fh.readline().split()[1])
        dims = tuple(int(v) for v in fh.readline().split()[1:])
        ghost = int(fh.readline().split()[1])
        periodic = tuple(v == "1" for v in fh.readline().split()[1:])
        shape = tuple(n + 2 * ghost for n in dims)
        data = np.loadtxt(fh, dtype=np.float64).reshape(-1, ndim)
    coords = tuple(data[:, k].reshape(shape) for k in range(ndim))
    return Grid(coords=coords, dims=dims, ghost=ghost, periodic=periodic,
                meta={"generator": "file"})
