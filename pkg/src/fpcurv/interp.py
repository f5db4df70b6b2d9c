"""Central face interpolation at selectable even order.

These are the symmetric stencils used to move node values to the i+1/2
faces, both for the conservative metric evaluation and for the reference
face-state machinery.  A node derivative is realized as the difference of
the two adjacent face values, which makes every derivative in the code a
telescoping flux difference.
"""

import numpy as np

from .errors import StencilError

SUPPORTED_ORDERS = (2, 4, 6, 8)

# Order-M face value x_{i+1/2} on nodes i-M/2+1 .. i+M/2, stored as integer
# numerators over a common denominator.  Accumulating the numerator first and
# dividing once keeps the face values exact on integer/dyadic node data
# (uniform Cartesian grids then carry exactly constant metrics).
FACE_NUMERATORS = {
    2: np.array([1.0, 1.0]),
    4: np.array([-1.0, 7.0, 7.0, -1.0]),
    6: np.array([1.0, -8.0, 37.0, 37.0, -8.0, 1.0]),
    8: np.array([-3.0, 29.0, -139.0, 533.0, 533.0, -139.0, 29.0, -3.0]),
}
FACE_DENOMINATOR = {2: 2.0, 4: 12.0, 6: 60.0, 8: 840.0}
FACE_COEFFS = {m: FACE_NUMERATORS[m] / FACE_DENOMINATOR[m] for m in FACE_NUMERATORS}


def check_order(order):
    if order not in SUPPORTED_ORDERS:
        raise ValueError(f"interpolation order must be one of {SUPPORTED_ORDERS}, got {order}")
    return int(order)


def face_interpolate(line, order, axis=-1):
    """Interpolate node values to faces along ``axis``.

    For an input with n nodes along ``axis`` the result has n - order + 1
    faces; face k of the output sits between input nodes k + order/2 - 1
    and k + order/2.

    Parameters
    ----------
    line : ndarray
        Node values; interpolation runs along ``axis``.
    order : int
        One of 2, 4, 6, 8.

    Raises
    ------
    StencilError
        If the line is shorter than the stencil.
    """
    order = check_order(order)
    line = np.asarray(line, dtype=np.float64)
    n = line.shape[axis]
    if n < order:
        raise StencilError(f"order-{order} face interpolation needs at least {order} nodes, got {n}")
    numer = FACE_NUMERATORS[order]
    line = np.moveaxis(line, axis, -1)
    out = numer[0] * line[..., : n - order + 1]
    for k in range(1, order):
        out = out + numer[k] * line[..., k : n - order + 1 + k]
    out /= FACE_DENOMINATOR[order]
    return np.moveaxis(out, -1, axis)


def face_difference(line, order, axis=-1):
    """Node-centered derivative: (x_{i+1/2} - x_{i-1/2}) with unit spacing.

    Output is ``order`` nodes shorter than the input along ``axis``; output
    node k corresponds to input node k + order/2.
    """
    faces = face_interpolate(line, order, axis=axis)
    faces = np.moveaxis(faces, axis, -1)
    out = faces[..., 1:] - faces[..., :-1]
    return np.moveaxis(out, -1, axis)


def required_ghost(order, recon_halfwidth):
    """Coordinate ghost layers needed: metric half-width plus field ghosts."""
    return check_order(order) // 2 + recon_halfwidth
