"""Symmetry-conservative metric evaluation and surface-conservation residuals.

Every derivative here is the difference of two interpolated face values at
the same even order, so the discrete mixed derivatives commute exactly and
the surface conservation law holds to roundoff whenever the residual is
formed with the same face-difference operator that built the metrics.

In 2D the symmetric 3D forms collapse (one trivial z = zeta layer) to

    xi_x/J =  y_eta    xi_y/J = -x_eta
    eta_x/J = -y_xi    eta_y/J =  x_xi

with 1/J the average of the xi- and eta-form conservative volume sums.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import GridFoldError, StencilError
from .interp import check_order, face_difference, face_interpolate

FOLD_RELATIVE_THRESHOLD = 1e-12


def _node_derivative(fld, order, axis):
    """Face-difference derivative, same shape as input, NaN at the margins."""
    out = np.full_like(fld, np.nan)
    half = order // 2
    d = face_difference(fld, order, axis=axis)
    sl = [slice(None)] * fld.ndim
    sl[axis] = slice(half, fld.shape[axis] - half)
    out[tuple(sl)] = d
    return out


def _face_values(fld, order, axis):
    """Face values aligned so index i along ``axis`` is the face i+1/2.

    Output is one shorter than the input along ``axis``; entries outside
    the stencil-supported range are NaN.
    """
    half = order // 2
    n = fld.shape[axis]
    shape = list(fld.shape)
    shape[axis] = n - 1
    out = np.full(shape, np.nan)
    vals = face_interpolate(fld, order, axis=axis)
    sl = [slice(None)] * fld.ndim
    sl[axis] = slice(half - 1, n - half)
    out[tuple(sl)] = vals
    return out


@dataclass
class MetricField:
    """SCMM metric ratios and inverse Jacobian on a padded node grid.

    center[a, b] holds (grad xi_a)_b / J; inv_jacobian holds 1/J.  Values
    are valid up to ``valid_ghost`` layers beyond the interior; deeper
    margins are NaN.  Face-interpolated metrics are cached per (axis,
    order) by the face() accessor.
    """

    order: int
    grid: object
    center: np.ndarray
    inv_jacobian: np.ndarray
    valid_ghost: int
    fold_threshold: float
    _faces: dict = field(default_factory=dict, repr=False)

    @property
    def ndim(self):
        return self.center.shape[0]

    def face(self, axis, order=None):
        """Face-interpolated (metric row, 1/J) for faces normal to ``axis``.

        Returns (metric, inv_j): metric[b] is (grad xi_axis)_b / J at the
        axis-faces, aligned so index i along ``axis`` is face i+1/2.
        """
        order = check_order(self.order if order is None else order)
        key = (axis, order)
        if key not in self._faces:
            metric = np.stack([_face_values(self.center[axis, b], order, axis)
                               for b in range(self.ndim)])
            inv_j = _face_values(self.inv_jacobian, order, axis)
            self._faces[key] = (metric, inv_j)
        return self._faces[key]


def _metrics_2d(x, y, order):
    d = lambda f, ax: _node_derivative(f, order, ax)
    xi_x = d(y, 1)
    xi_y = -d(x, 1)
    eta_x = -d(y, 0)
    eta_y = d(x, 0)
    inv_j = 0.5 * (d(x * xi_x + y * xi_y, 0) + d(x * eta_x + y * eta_y, 1))
    center = np.stack([np.stack([xi_x, xi_y]), np.stack([eta_x, eta_y])])
    return center, inv_j


def _metrics_3d(x, y, z, order):
    d = lambda f, ax: _node_derivative(f, order, ax)
    x_xi, x_eta, x_zeta = d(x, 0), d(x, 1), d(x, 2)
    y_xi, y_eta, y_zeta = d(y, 0), d(y, 1), d(y, 2)
    z_xi, z_eta, z_zeta = d(z, 0), d(z, 1), d(z, 2)

    xi_x = 0.5 * (d(y_eta * z, 2) - d(y_zeta * z, 1) + d(y * z_zeta, 1) - d(y * z_eta, 2))
    xi_y = 0.5 * (d(x * z_eta, 2) - d(x * z_zeta, 1) + d(x_zeta * z, 1) - d(x_eta * z, 2))
    xi_z = 0.5 * (d(x_eta * y, 2) - d(x_zeta * y, 1) + d(x * y_zeta, 1) - d(x * y_eta, 2))

    eta_x = 0.5 * (d(y_zeta * z, 0) - d(y_xi * z, 2) + d(y * z_xi, 2) - d(y * z_zeta, 0))
    eta_y = 0.5 * (d(x * z_zeta, 0) - d(x * z_xi, 2) + d(x_xi * z, 2) - d(x_zeta * z, 0))
    eta_z = 0.5 * (d(x_zeta * y, 0) - d(x_xi * y, 2) + d(x * y_xi, 2) - d(x * y_zeta, 0))

    zeta_x = 0.5 * (d(y_xi * z, 1) - d(y_eta * z, 0) + d(y * z_eta, 0) - d(y * z_xi, 1))
    zeta_y = 0.5 * (d(x * z_xi, 1) - d(x * z_eta, 0) + d(x_eta * z, 0) - d(x_xi * z, 1))
    zeta_z = 0.5 * (d(x_xi * y, 1) - d(x_eta * y, 0) + d(x * y_eta, 0) - d(x * y_xi, 1))

    inv_j = (d(x * xi_x + y * xi_y + z * xi_z, 0)
             + d(x * eta_x + y * eta_y + z * eta_z, 1)
             + d(x * zeta_x + y * zeta_y + z * zeta_z, 2)) / 3.0
    center = np.stack([
        np.stack([xi_x, xi_y, xi_z]),
        np.stack([eta_x, eta_y, eta_z]),
        np.stack([zeta_x, zeta_y, zeta_z]),
    ])
    return center, inv_j


def compute_metrics_scmm(grid, order, _fold_check_interior_only=False):
    """Evaluate SCMM metrics and 1/J for a grid at the given order.

    Raises GridFoldError (naming the first offending interior cell) if any
    interior 1/J is nonpositive.
    """
    order = check_order(order)
    half = order // 2
    if grid.ghost < half:
        raise StencilError(
            f"order-{order} metrics need at least {half} ghost layers, grid has {grid.ghost}")
    if grid.ndim == 2:
        center, inv_j = _metrics_2d(grid.coords[0], grid.coords[1], order)
    elif grid.ndim == 3:
        center, inv_j = _metrics_3d(grid.coords[0], grid.coords[1], grid.coords[2], order)
    else:
        raise ValueError(f"unsupported grid dimension {grid.ndim}")

    inv_j_int = grid.interior(inv_j)
    if np.any(~np.isfinite(inv_j_int)):
        raise GridFoldError("non-finite 1/J in interior", where=None)
    med = float(np.median(inv_j_int))
    threshold = FOLD_RELATIVE_THRESHOLD * med
    bad = inv_j_int <= threshold
    if np.any(bad):
        idx = tuple(int(v) for v in np.argwhere(bad)[0])
        raise GridFoldError(
            f"grid fold: 1/J = {inv_j_int[idx]:.6e} <= {threshold:.3e} at interior cell {idx}",
            where=idx)
    return MetricField(order=order, grid=grid, center=center, inv_jacobian=inv_j,
                       valid_ghost=grid.ghost - half, fold_threshold=threshold)


def scl_residual(metrics, order=None):
    """Surface-conservation residual (I_x, I_y[, I_z]) on interior nodes.

    I_b = sum_a D_a((grad xi_a)_b / J) with D the order-``order``
    face-difference operator (defaults to the metric order; passing a
    different order demonstrates the sufficient-condition violation).
    """
    order = check_order(metrics.order if order is None else order)
    grid = metrics.grid
    ndim = metrics.ndim
    if metrics.valid_ghost < order // 2:
        raise StencilError("metric ghost margin too small for the requested residual order")
    res = []
    for b in range(ndim):
        total = None
        for a in range(ndim):
            term = _node_derivative(metrics.center[a, b], order, axis=a)
            total = term if total is None else total + term
        res.append(grid.interior(total))
    return np.stack(res)


def scl_residual_relative(metrics, order=None):
    """max |I| normalized by the largest interior metric magnitude."""
    res = scl_residual(metrics, order)
    scale = max(float(np.max(np.abs(metrics.grid.interior(metrics.center[a, b]))))
                for a in range(metrics.ndim) for b in range(metrics.ndim))
    return float(np.max(np.abs(res))) / scale
