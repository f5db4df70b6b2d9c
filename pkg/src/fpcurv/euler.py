"""2D compressible Euler state algebra in generalized coordinates.

States are numpy arrays with a trailing component axis:
conserved  (rho, rho u, rho v, rho E), primitive (rho, u, v, p).
All operations broadcast over leading axes.  gamma = 1.4 throughout.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidStateError

GAMMA = 1.4
NVAR = 4


def primitive_to_conserved(prim):
    """(rho, u, v, p) -> (rho, rho u, rho v, rho E) with rho E = p/(g-1) + rho|u|^2/2."""
    prim = np.asarray(prim, dtype=np.float64)
    rho, u, v, p = prim[..., 0], prim[..., 1], prim[..., 2], prim[..., 3]
    out = np.empty_like(prim)
    out[..., 0] = rho
    out[..., 1] = rho * u
    out[..., 2] = rho * v
    out[..., 3] = p / (GAMMA - 1.0) + 0.5 * rho * (u * u + v * v)
    return out


def conserved_to_primitive(cons, where=None):
    """Invert primitive_to_conserved; raises InvalidStateError on rho<=0 or p<=0."""
    cons = np.asarray(cons, dtype=np.float64)
    rho = cons[..., 0]
    u = cons[..., 1] / rho
    v = cons[..., 2] / rho
    p = (GAMMA - 1.0) * (cons[..., 3] - 0.5 * rho * (u * u + v * v))
    bad = ~((rho > 0.0) & (p > 0.0) & np.isfinite(p) & np.isfinite(rho))
    if np.any(bad):
        idx = tuple(int(k) for k in np.argwhere(bad)[0]) if bad.ndim else ()
        raise InvalidStateError(
            f"invalid state (rho or p nonpositive) at index {idx}", where=where or idx)
    out = np.empty_like(cons)
    out[..., 0] = rho
    out[..., 1] = u
    out[..., 2] = v
    out[..., 3] = p
    return out


def pressure(cons):
    cons = np.asarray(cons, dtype=np.float64)
    rho = cons[..., 0]
    return (GAMMA - 1.0) * (cons[..., 3] - 0.5 * (cons[..., 1] ** 2 + cons[..., 2] ** 2) / rho)


def sound_speed(cons):
    return np.sqrt(GAMMA * pressure(cons) / cons[..., 0])


def physical_flux(cons, axis):
    """Physical flux vector F (axis=0) or G (axis=1) of a conserved state."""
    cons = np.asarray(cons, dtype=np.float64)
    rho = cons[..., 0]
    u = cons[..., 1] / rho
    v = cons[..., 2] / rho
    p = pressure(cons)
    vel = u if axis == 0 else v
    out = np.empty_like(cons)
    out[..., 0] = rho * vel
    out[..., 1] = cons[..., 1] * vel
    out[..., 2] = cons[..., 2] * vel
    if axis == 0:
        out[..., 1] += p
    else:
        out[..., 2] += p
    out[..., 3] = (cons[..., 3] + p) * vel
    return out


def transformed_flux(cons, metric_row):
    """F~ = (xi_x/J) F + (xi_y/J) G for a metric row (broadcastable pair)."""
    a, b = metric_row[..., 0], metric_row[..., 1]
    return a[..., None] * physical_flux(cons, 0) + b[..., None] * physical_flux(cons, 1)


@dataclass
class RoeState:
    """Density-weighted face averages used to linearize the flux Jacobian."""

    rho: np.ndarray
    u: np.ndarray
    v: np.ndarray
    h: np.ndarray  # total specific enthalpy
    c: np.ndarray  # sound speed from the averaged enthalpy


def roe_average(cons_l, cons_r):
    """Standard sqrt-density-weighted average of two conserved states."""
    cons_l = np.asarray(cons_l, dtype=np.float64)
    cons_r = np.asarray(cons_r, dtype=np.float64)
    rho_l, rho_r = cons_l[..., 0], cons_r[..., 0]
    w = np.sqrt(rho_r / rho_l)
    denom = 1.0 + w
    u = (cons_l[..., 1] / rho_l + w * cons_r[..., 1] / rho_r) / denom
    v = (cons_l[..., 2] / rho_l + w * cons_r[..., 2] / rho_r) / denom
    h_l = (cons_l[..., 3] + pressure(cons_l)) / rho_l
    h_r = (cons_r[..., 3] + pressure(cons_r)) / rho_r
    h = (h_l + w * h_r) / denom
    c2 = (GAMMA - 1.0) * (h - 0.5 * (u * u + v * v))
    if np.any(c2 <= 0.0):
        raise InvalidStateError("Roe-averaged sound speed is imaginary")
    return RoeState(rho=np.sqrt(rho_l * rho_r), u=u, v=v, h=h, c=np.sqrt(c2))


@dataclass
class CharacteristicSystem:
    """Eigendecomposition of d(n . (F, G))/dQ at an averaged state.

    left/right are (..., 4, 4) with right @ left = I; lam is (..., 4) with
    lam = (Un - c|n|, Un, Un, Un + c|n|), Un = n . u.  The eigenvectors are
    built from the unit normal, so they are invariant under rescaling of n.
    """

    left: np.ndarray
    right: np.ndarray
    lam: np.ndarray
    normal: np.ndarray


def eigensystem(avg, normal):
    """Characteristic system for the face metric vector ``normal`` = (a, b).

    R diag(lam) L reproduces the Jacobian of transformed_flux(q, normal)
    with respect to the conserved state at the averaged state.
    """
    normal = np.asarray(normal, dtype=np.float64)
    a, b = normal[..., 0], normal[..., 1]
    mag = np.hypot(a, b)
    if np.any(mag < 1e-300):
        raise ValueError("degenerate face normal")
    nx, ny = a / mag, b / mag
    u, v, h, c = avg.u, avg.v, avg.h, avg.c
    un = nx * u + ny * v
    ek = 0.5 * (u * u + v * v)
    b1 = (GAMMA - 1.0) / (c * c)
    b2 = b1 * ek

    shape = np.broadcast_shapes(u.shape, nx.shape) if hasattr(u, "shape") else ()
    left = np.zeros(shape + (NVAR, NVAR))
    right = np.zeros(shape + (NVAR, NVAR))

    right[..., 0, 0] = 1.0
    right[..., 1, 0] = u - c * nx
    right[..., 2, 0] = v - c * ny
    right[..., 3, 0] = h - c * un
    right[..., 0, 1] = 1.0
    right[..., 1, 1] = u
    right[..., 2, 1] = v
    right[..., 3, 1] = ek
    right[..., 1, 2] = -ny
    right[..., 2, 2] = nx
    right[..., 3, 2] = v * nx - u * ny
    right[..., 0, 3] = 1.0
    right[..., 1, 3] = u + c * nx
    right[..., 2, 3] = v + c * ny
    right[..., 3, 3] = h + c * un

    left[..., 0, 0] = 0.5 * (b2 + un / c)
    left[..., 0, 1] = -0.5 * (b1 * u + nx / c)
    left[..., 0, 2] = -0.5 * (b1 * v + ny / c)
    left[..., 0, 3] = 0.5 * b1
    left[..., 1, 0] = 1.0 - b2
    left[..., 1, 1] = b1 * u
    left[..., 1, 2] = b1 * v
    left[..., 1, 3] = -b1
    left[..., 2, 0] = u * ny - v * nx
    left[..., 2, 1] = -ny
    left[..., 2, 2] = nx
    left[..., 3, 0] = 0.5 * (b2 - un / c)
    left[..., 3, 1] = -0.5 * (b1 * u - nx / c)
    left[..., 3, 2] = -0.5 * (b1 * v - ny / c)
    left[..., 3, 3] = 0.5 * b1

    uc = a * u + b * v
    lam = np.stack([uc - c * mag, uc, uc, uc + c * mag], axis=-1)
    return CharacteristicSystem(left=left, right=right, lam=lam, normal=normal)


def flux_jacobian(cons, normal):
    """Analytic Jacobian of transformed_flux(cons, normal) w.r.t. cons."""
    cons = np.asarray(cons, dtype=np.float64)
    a, b = np.asarray(normal)[..., 0], np.asarray(normal)[..., 1]
    rho = cons[..., 0]
    u = cons[..., 1] / rho
    v = cons[..., 2] / rho
    p = pressure(cons)
    htot = (cons[..., 3] + p) / rho
    un = a * u + b * v
    ek = 0.5 * (u * u + v * v)
    g1 = GAMMA - 1.0
    shape = np.broadcast_shapes(rho.shape, np.shape(a)) if hasattr(rho, "shape") else ()
    jac = np.zeros(shape + (NVAR, NVAR))
    jac[..., 0, 1] = a
    jac[..., 0, 2] = b
    jac[..., 1, 0] = a * g1 * ek - u * un
    jac[..., 1, 1] = un + a * (2.0 - GAMMA) * u
    jac[..., 1, 2] = b * u - g1 * a * v
    jac[..., 1, 3] = g1 * a
    jac[..., 2, 0] = b * g1 * ek - v * un
    jac[..., 2, 1] = a * v - g1 * b * u
    jac[..., 2, 2] = un + b * (2.0 - GAMMA) * v
    jac[..., 2, 3] = g1 * b
    jac[..., 3, 0] = un * (g1 * ek - htot)
    jac[..., 3, 1] = a * htot - g1 * u * un
    jac[..., 3, 2] = b * htot - g1 * v * un
    jac[..., 3, 3] = GAMMA * un
    return jac
