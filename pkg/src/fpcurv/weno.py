"""Upwind-biased face reconstruction kernels.

All kernels produce the left-biased ("plus") value at face i+1/2 and
reconstruct along the last axis; inputs are node values ordered
(i-2 .. i+2) for the 5-point kernels and (i-3 .. i+3) for the 7-point
ones.  The right-biased ("minus") value at the same face is obtained by
applying the same kernel to the reversed window, which is how the flux
drivers use them.
"""

import numpy as np

# Left-biased 5th-order upwind face value on nodes i-2 .. i+2.
UPWIND5 = np.array([2.0, -13.0, 47.0, 27.0, -3.0]) / 60.0
# 6th-order central face value on nodes i-2 .. i+3.
CENTRAL6 = np.array([1.0, -8.0, 37.0, 37.0, -8.0, 1.0]) / 60.0
# Left-biased 7th-order upwind face value on nodes i-3 .. i+3.
UPWIND7 = np.array([-3.0, 25.0, -101.0, 319.0, 214.0, -38.0, 4.0]) / 420.0

WENO5_OPTIMAL = np.array([0.1, 0.6, 0.3])
WENO7_OPTIMAL = np.array([1.0, 12.0, 18.0, 4.0]) / 35.0


def linear_upwind5(f):
    """5th-order linear upwind face value; f has nodes i-2..i+2 on the last axis."""
    return f @ UPWIND5


def central6(f):
    """6th-order central face value; f has nodes i-2..i+3 on the last axis."""
    return f @ CENTRAL6


def linear_upwind7(f):
    return f @ UPWIND7


def weno5_weights(f, eps=1e-6, power=2):
    """Nonlinear weights (..., 3) of the classical 5th-order WENO scheme."""
    f0, f1, f2, f3, f4 = (f[..., k] for k in range(5))
    b0 = 13.0 / 12.0 * (f0 - 2.0 * f1 + f2) ** 2 + 0.25 * (f0 - 4.0 * f1 + 3.0 * f2) ** 2
    b1 = 13.0 / 12.0 * (f1 - 2.0 * f2 + f3) ** 2 + 0.25 * (f1 - f3) ** 2
    b2 = 13.0 / 12.0 * (f2 - 2.0 * f3 + f4) ** 2 + 0.25 * (3.0 * f2 - 4.0 * f3 + f4) ** 2
    beta = np.stack([b0, b1, b2], axis=-1)
    alpha = WENO5_OPTIMAL / (beta + eps) ** power
    return alpha / np.sum(alpha, axis=-1, keepdims=True)


def weno5(f, eps=1e-6, power=2, force_optimal=False, return_weights=False):
    """Classical 5th-order WENO face value on nodes i-2..i+2 (last axis)."""
    f0, f1, f2, f3, f4 = (f[..., k] for k in range(5))
    q0 = (2.0 * f0 - 7.0 * f1 + 11.0 * f2) / 6.0
    q1 = (-f1 + 5.0 * f2 + 2.0 * f3) / 6.0
    q2 = (2.0 * f2 + 5.0 * f3 - f4) / 6.0
    if force_optimal:
        w = np.broadcast_to(WENO5_OPTIMAL, f.shape[:-1] + (3,))
    else:
        w = weno5_weights(f, eps, power)
    out = w[..., 0] * q0 + w[..., 1] * q1 + w[..., 2] * q2
    if return_weights:
        return out, w
    return out


# Smoothness quadratic forms in the candidate first differences (e_k, e_k+1,
# e_k+2); algebraically identical to the published nodal-product forms but
# exact on constant stencils (no large-coefficient cancellation).
_BETA7_DFORM = np.array([
    [547.0, -2788.0, 1854.0, 3708.0, -5188.0, 2107.0],
    [267.0, -1108.0, 494.0, 1468.0, -1428.0, 547.0],
    [547.0, -1428.0, 494.0, 1468.0, -1108.0, 267.0],
    [2107.0, -5188.0, 1854.0, 3708.0, -2788.0, 547.0],
])


def weno7_weights(f, eps=1e-6, power=2):
    """Nonlinear weights (..., 4) of the standard 7th-order WENO scheme."""
    e = f[..., 1:] - f[..., :-1]
    betas = []
    for k in range(4):
        a, b, c, d, g, h = _BETA7_DFORM[k]
        e0, e1, e2 = e[..., k], e[..., k + 1], e[..., k + 2]
        betas.append(a * e0 * e0 + b * e0 * e1 + c * e0 * e2
                     + d * e1 * e1 + g * e1 * e2 + h * e2 * e2)
    beta = np.stack(betas, axis=-1)
    alpha = WENO7_OPTIMAL / (beta + eps) ** power
    return alpha / np.sum(alpha, axis=-1, keepdims=True)


def weno7(f, eps=1e-6, power=2, force_optimal=False, return_weights=False):
    """Standard 7th-order WENO face value on nodes i-3..i+3 (last axis)."""
    f0, f1, f2, f3, f4, f5, f6 = (f[..., k] for k in range(7))
    q0 = (-3.0 * f0 + 13.0 * f1 - 23.0 * f2 + 25.0 * f3) / 12.0
    q1 = (f1 - 5.0 * f2 + 13.0 * f3 + 3.0 * f4) / 12.0
    q2 = (-f2 + 7.0 * f3 + 7.0 * f4 - f5) / 12.0
    q3 = (3.0 * f3 + 13.0 * f4 - 5.0 * f5 + f6) / 12.0
    if force_optimal:
        w = np.broadcast_to(WENO7_OPTIMAL, f.shape[:-1] + (4,))
    else:
        w = weno7_weights(f, eps, power)
    out = w[..., 0] * q0 + w[..., 1] * q1 + w[..., 2] * q2 + w[..., 3] * q3
    if return_weights:
        return out, w
    return out
