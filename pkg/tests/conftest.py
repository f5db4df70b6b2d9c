import numpy as np
import pytest

from fpcurv import euler
from fpcurv.grids import generate_random_grid, generate_wavy_grid
from fpcurv.metrics import compute_metrics_scmm
from fpcurv.reconstruction import SchemeConfig
from fpcurv.solver import initialize_field

FREE_STREAM = np.array([1.4, 0.5, 0.0, 1.0])  # rho, u, v, p (Ma = 0.5, c = 1)


def free_stream_fn(x, y):
    return np.broadcast_to(FREE_STREAM, x.shape + (4,)).copy()


def smooth_field_fn(x, y):
    """Random-ish smooth primitive field for equivalence tests."""
    prim = np.empty(x.shape + (4,))
    prim[..., 0] = 1.2 + 0.2 * np.sin(0.6 * x) * np.cos(0.4 * y)
    prim[..., 1] = 0.4 + 0.15 * np.cos(0.5 * x + 0.3 * y)
    prim[..., 2] = -0.1 + 0.12 * np.sin(0.45 * y) * np.cos(0.2 * x)
    prim[..., 3] = 1.0 + 0.18 * np.cos(0.35 * x) * np.sin(0.55 * y)
    return prim


def periodic_field_fn(x, y, period=20.0):
    """Smooth field with the domain period (for fully periodic cases)."""
    kx = 2.0 * np.pi / period
    prim = np.empty(x.shape + (4,))
    prim[..., 0] = 1.3 + 0.15 * np.sin(kx * x) * np.cos(2 * kx * y)
    prim[..., 1] = 0.5 + 0.1 * np.cos(kx * (x + y))
    prim[..., 2] = 0.08 * np.sin(2 * kx * x) * np.sin(kx * y)
    prim[..., 3] = 1.0 + 0.12 * np.cos(kx * y)
    return prim


def make_field(grid, order, prim_fn=free_stream_fn):
    metrics = compute_metrics_scmm(grid, order)
    return initialize_field(grid, metrics, prim_fn)


@pytest.fixture(scope="session")
def wavy21():
    return generate_wavy_grid(21, 21, ghost=9)


@pytest.fixture(scope="session")
def random21():
    return generate_random_grid(21, 21, amplitude_fraction=0.2, seed=12, ghost=9)


def scheme(name="weno5", fp=True, order=6, **kw):
    return SchemeConfig(scheme=name, fp=fp, metric_order=order, **kw)


def flux_scale(field):
    """Reference magnitude of the transformed fluxes for RHS tolerances."""
    grid = field.grid
    q = field.interior_q()
    invj = grid.interior(field.metrics.inv_jacobian)
    scale = 0.0
    for axis in (0, 1):
        row = np.stack([grid.interior(field.metrics.center[axis, 0]),
                        grid.interior(field.metrics.center[axis, 1])], axis=-1)
        scale = max(scale, float(np.max(np.abs(euler.transformed_flux(q, row)))))
    return scale
