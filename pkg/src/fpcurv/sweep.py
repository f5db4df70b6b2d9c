"""Fused numba sweep kernel (production path).

One call reconstructs every face of one sweep direction.  The formulas
mirror ``reconstruction`` term for term (including the face-minus-node
grouping of the FP correction, so uniform Cartesian grids reduce to the
standard schemes bitwise); parity with the reference path is enforced by
tests.  Lines are independent, so the kernel is deterministic for any
thread count.
"""

import numpy as np
from numba import njit, prange

from . import euler
from .errors import GridFoldError
from .interp import FACE_DENOMINATOR, FACE_NUMERATORS

GAMMA = euler.GAMMA

_SCHEME_IDS = {"linear_upwind5": 0, "weno5": 1, "weno7": 2}


@njit(cache=True, inline="always", error_model="numpy", fastmath={"contract"})
def _weno5_scalar(f0, f1, f2, f3, f4, eps, power, force_opt):
    if force_opt:
        w0, w1, w2 = 0.1, 0.6, 0.3
    else:
        b0 = 13.0 / 12.0 * (f0 - 2.0 * f1 + f2) ** 2 + 0.25 * (f0 - 4.0 * f1 + 3.0 * f2) ** 2
        b1 = 13.0 / 12.0 * (f1 - 2.0 * f2 + f3) ** 2 + 0.25 * (f1 - f3) ** 2
        b2 = 13.0 / 12.0 * (f2 - 2.0 * f3 + f4) ** 2 + 0.25 * (3.0 * f2 - 4.0 * f3 + f4) ** 2
        if power == 2:
            a0 = 0.1 / ((b0 + eps) * (b0 + eps))
            a1 = 0.6 / ((b1 + eps) * (b1 + eps))
            a2 = 0.3 / ((b2 + eps) * (b2 + eps))
        else:
            a0 = 0.1 / (b0 + eps) ** power
            a1 = 0.6 / (b1 + eps) ** power
            a2 = 0.3 / (b2 + eps) ** power
        s = a0 + a1 + a2
        w0, w1, w2 = a0 / s, a1 / s, a2 / s
    q0 = (2.0 * f0 - 7.0 * f1 + 11.0 * f2) / 6.0
    q1 = (-f1 + 5.0 * f2 + 2.0 * f3) / 6.0
    q2 = (2.0 * f2 + 5.0 * f3 - f4) / 6.0
    return w0 * q0 + w1 * q1 + w2 * q2


@njit(cache=True, inline="always", error_model="numpy", fastmath={"contract"})
def _weno7_scalar(f0, f1, f2, f3, f4, f5, f6, eps, power, force_opt):
    c0, c1, c2, c3 = 1.0 / 35.0, 12.0 / 35.0, 18.0 / 35.0, 4.0 / 35.0
    if force_opt:
        w0, w1, w2, w3 = c0, c1, c2, c3
    else:
        e0 = f1 - f0
        e1 = f2 - f1
        e2 = f3 - f2
        e3 = f4 - f3
        e4 = f5 - f4
        e5 = f6 - f5
        b0 = (547.0 * e0 * e0 - 2788.0 * e0 * e1 + 1854.0 * e0 * e2
              + 3708.0 * e1 * e1 - 5188.0 * e1 * e2 + 2107.0 * e2 * e2)
        b1 = (267.0 * e1 * e1 - 1108.0 * e1 * e2 + 494.0 * e1 * e3
              + 1468.0 * e2 * e2 - 1428.0 * e2 * e3 + 547.0 * e3 * e3)
        b2 = (547.0 * e2 * e2 - 1428.0 * e2 * e3 + 494.0 * e2 * e4
              + 1468.0 * e3 * e3 - 1108.0 * e3 * e4 + 267.0 * e4 * e4)
        b3 = (2107.0 * e3 * e3 - 5188.0 * e3 * e4 + 1854.0 * e3 * e5
              + 3708.0 * e4 * e4 - 2788.0 * e4 * e5 + 547.0 * e5 * e5)
        if power == 2:
            a0 = c0 / ((b0 + eps) * (b0 + eps))
            a1 = c1 / ((b1 + eps) * (b1 + eps))
            a2 = c2 / ((b2 + eps) * (b2 + eps))
            a3 = c3 / ((b3 + eps) * (b3 + eps))
        else:
            a0 = c0 / (b0 + eps) ** power
            a1 = c1 / (b1 + eps) ** power
            a2 = c2 / (b2 + eps) ** power
            a3 = c3 / (b3 + eps) ** power
        s = a0 + a1 + a2 + a3
        w0, w1, w2, w3 = a0 / s, a1 / s, a2 / s, a3 / s
    q0 = (-3.0 * f0 + 13.0 * f1 - 23.0 * f2 + 25.0 * f3) / 12.0
    q1 = (f1 - 5.0 * f2 + 13.0 * f3 + 3.0 * f4) / 12.0
    q2 = (-f2 + 7.0 * f3 + 7.0 * f4 - f5) / 12.0
    q3 = (3.0 * f3 + 13.0 * f4 - 5.0 * f5 + f6) / 12.0
    return w0 * q0 + w1 * q1 + w2 * q2 + w3 * q3


@njit(cache=True, inline="always", error_model="numpy", fastmath={"contract"})
def _upwind5_scalar(f0, f1, f2, f3, f4):
    return (2.0 * f0 - 13.0 * f1 + 47.0 * f2 + 27.0 * f3 - 3.0 * f4) / 60.0


@njit(cache=True, parallel=True, error_model="numpy", fastmath={"contract"})
def _sweep_kernel(qt, ft, invj, mx, my, rho_n, u_n, v_n, h_n, c_n,
                  fmx, fmy, fvj, mnum, mden, g,
                  scheme_id, fp, eps, power, force_opt,
                  use_global, glam, lam_floor, fold_tol, flux, err):
    nlines, nfaces = fvj.shape
    half = 3 if scheme_id != 2 else 4  # reconstruction halfwidth
    width = 2 * half
    mh = mnum.shape[0] // 2
    gm1 = GAMMA - 1.0

    for ln in prange(nlines):
        fplus = np.empty((width, 4))
        fminus = np.empty((width, 4))
        left = np.empty((4, 4))
        right = np.empty((4, 4))
        lam = np.empty(4)
        qstar = np.empty(4)
        fstar = np.empty(4)
        gstar = np.empty(4)
        chars = np.empty(4)
        for f in range(nfaces):
            i0 = g - 1 + f
            a = fmx[ln, f]
            b = fmy[ln, f]
            vj = fvj[ln, f]
            if not (vj > fold_tol):
                err[ln, f] = 1
                continue

            if fp:
                # reference face state Q* = Q~_{i+1/2} / (1/J)_{i+1/2}
                for s in range(4):
                    acc = 0.0
                    for k in range(2 * mh):
                        acc += mnum[k] * qt[ln, i0 - mh + 1 + k, s]
                    qstar[s] = (acc / mden) / vj
                rs = qstar[0]
                us = qstar[1] / rs
                vs = qstar[2] / rs
                ps = gm1 * (qstar[3] - 0.5 * rs * (us * us + vs * vs))
                if not (rs > 0.0 and ps > 0.0):
                    # inadmissible interpolation ratio across a strong jump:
                    # two-point ratio (convex in the adjacent node states)
                    den2 = invj[ln, i0] + invj[ln, i0 + 1]
                    for s in range(4):
                        qstar[s] = (qt[ln, i0, s] + qt[ln, i0 + 1, s]) / den2
                    rs = qstar[0]
                    us = qstar[1] / rs
                    vs = qstar[2] / rs
                    ps = gm1 * (qstar[3] - 0.5 * rs * (us * us + vs * vs))
                fstar[0] = qstar[0] * us
                fstar[1] = qstar[1] * us + ps
                fstar[2] = qstar[2] * us
                fstar[3] = (qstar[3] + ps) * us
                gstar[0] = qstar[0] * vs
                gstar[1] = qstar[1] * vs
                gstar[2] = qstar[2] * vs + ps
                gstar[3] = (qstar[3] + ps) * vs

            # Roe average of the two adjacent nodes
            rl = rho_n[ln, i0]
            rr = rho_n[ln, i0 + 1]
            wgt = np.sqrt(rr / rl)
            den = 1.0 + wgt
            ur = (u_n[ln, i0] + wgt * u_n[ln, i0 + 1]) / den
            vr = (v_n[ln, i0] + wgt * v_n[ln, i0 + 1]) / den
            hr = (h_n[ln, i0] + wgt * h_n[ln, i0 + 1]) / den
            cr = np.sqrt(gm1 * (hr - 0.5 * (ur * ur + vr * vr)))

            mag = np.sqrt(a * a + b * b)
            nx = a / mag
            ny = b / mag
            un = nx * ur + ny * vr
            ek = 0.5 * (ur * ur + vr * vr)
            b1 = gm1 / (cr * cr)
            b2 = b1 * ek

            right[0, 0] = 1.0
            right[1, 0] = ur - cr * nx
            right[2, 0] = vr - cr * ny
            right[3, 0] = hr - cr * un
            right[0, 1] = 1.0
            right[1, 1] = ur
            right[2, 1] = vr
            right[3, 1] = ek
            right[0, 2] = 0.0
            right[1, 2] = -ny
            right[2, 2] = nx
            right[3, 2] = vr * nx - ur * ny
            right[0, 3] = 1.0
            right[1, 3] = ur + cr * nx
            right[2, 3] = vr + cr * ny
            right[3, 3] = hr + cr * un

            left[0, 0] = 0.5 * (b2 + un / cr)
            left[0, 1] = -0.5 * (b1 * ur + nx / cr)
            left[0, 2] = -0.5 * (b1 * vr + ny / cr)
            left[0, 3] = 0.5 * b1
            left[1, 0] = 1.0 - b2
            left[1, 1] = b1 * ur
            left[1, 2] = b1 * vr
            left[1, 3] = -b1
            left[2, 0] = ur * ny - vr * nx
            left[2, 1] = -ny
            left[2, 2] = nx
            left[2, 3] = 0.0
            left[3, 0] = 0.5 * (b2 - un / cr)
            left[3, 1] = -0.5 * (b1 * ur - nx / cr)
            left[3, 2] = -0.5 * (b1 * vr - ny / cr)
            left[3, 3] = 0.5 * b1

            if use_global:
                for s in range(4):
                    lam[s] = glam[s]
            else:
                tx = a / vj
                ty = b / vj
                tmag = np.sqrt(tx * tx + ty * ty)
                for s in range(4):
                    lam[s] = 0.0
                for mend in (i0 - half + 1, i0 + half):
                    ue = u_n[ln, mend]
                    ve = v_n[ln, mend]
                    ce = c_n[ln, mend]
                    une = tx * ue + ty * ve
                    l0 = abs(une - ce * tmag)
                    l1 = abs(une)
                    l3 = abs(une + ce * tmag)
                    if l0 > lam[0]:
                        lam[0] = l0
                    if l1 > lam[1]:
                        lam[1] = l1
                        lam[2] = l1
                    if l3 > lam[3]:
                        lam[3] = l3
            if lam_floor > 0.0:
                for s in range(4):
                    if lam[s] < lam_floor:
                        lam[s] = lam_floor

            # characteristic projection of the (possibly FP-modified) window
            for m in range(width):
                mi = i0 - half + 1 + m
                if fp:
                    ivm = invj[ln, mi]
                    cfx = (fstar[0] * a + gstar[0] * b) - (fstar[0] * mx[ln, mi] + gstar[0] * my[ln, mi])
                    cfy = (fstar[1] * a + gstar[1] * b) - (fstar[1] * mx[ln, mi] + gstar[1] * my[ln, mi])
                    cfz = (fstar[2] * a + gstar[2] * b) - (fstar[2] * mx[ln, mi] + gstar[2] * my[ln, mi])
                    cfe = (fstar[3] * a + gstar[3] * b) - (fstar[3] * mx[ln, mi] + gstar[3] * my[ln, mi])
                    f0 = ft[ln, mi, 0] + cfx
                    f1 = ft[ln, mi, 1] + cfy
                    f2 = ft[ln, mi, 2] + cfz
                    f3 = ft[ln, mi, 3] + cfe
                    q0 = qt[ln, mi, 0] + (qstar[0] * vj - qstar[0] * ivm)
                    q1 = qt[ln, mi, 1] + (qstar[1] * vj - qstar[1] * ivm)
                    q2 = qt[ln, mi, 2] + (qstar[2] * vj - qstar[2] * ivm)
                    q3 = qt[ln, mi, 3] + (qstar[3] * vj - qstar[3] * ivm)
                else:
                    f0 = ft[ln, mi, 0]
                    f1 = ft[ln, mi, 1]
                    f2 = ft[ln, mi, 2]
                    f3 = ft[ln, mi, 3]
                    q0 = qt[ln, mi, 0]
                    q1 = qt[ln, mi, 1]
                    q2 = qt[ln, mi, 2]
                    q3 = qt[ln, mi, 3]
                for s in range(4):
                    lf = left[s, 0] * f0 + left[s, 1] * f1 + left[s, 2] * f2 + left[s, 3] * f3
                    lq = left[s, 0] * q0 + left[s, 1] * q1 + left[s, 2] * q2 + left[s, 3] * q3
                    fplus[m, s] = 0.5 * (lf + lam[s] * lq)
                    fminus[m, s] = 0.5 * (lf - lam[s] * lq)

            # upwind reconstruction per characteristic field
            for s in range(4):
                if scheme_id == 0:
                    vp = _upwind5_scalar(fplus[0, s], fplus[1, s], fplus[2, s],
                                         fplus[3, s], fplus[4, s])
                    vm = _upwind5_scalar(fminus[5, s], fminus[4, s], fminus[3, s],
                                         fminus[2, s], fminus[1, s])
                elif scheme_id == 1:
                    vp = _weno5_scalar(fplus[0, s], fplus[1, s], fplus[2, s],
                                       fplus[3, s], fplus[4, s], eps, power, force_opt)
                    vm = _weno5_scalar(fminus[5, s], fminus[4, s], fminus[3, s],
                                       fminus[2, s], fminus[1, s], eps, power, force_opt)
                else:
                    vp = _weno7_scalar(fplus[0, s], fplus[1, s], fplus[2, s], fplus[3, s],
                                       fplus[4, s], fplus[5, s], fplus[6, s],
                                       eps, power, force_opt)
                    vm = _weno7_scalar(fminus[7, s], fminus[6, s], fminus[5, s], fminus[4, s],
                                       fminus[3, s], fminus[2, s], fminus[1, s],
                                       eps, power, force_opt)
                chars[s] = vp + vm
            for comp in range(4):
                flux[ln, f, comp] = (right[comp, 0] * chars[0] + right[comp, 1] * chars[1]
                                     + right[comp, 2] * chars[2] + right[comp, 3] * chars[3])


def fused_sweep(field, axis, config, global_lam=None):
    """Face fluxes for one sweep direction via the fused kernel."""
    from .solver import _sweep_arrays

    qt, invj, mx, my, fmx, fmy, fvj = _sweep_arrays(field, axis, config)
    prim_rho = qt[..., 0] / invj
    u = qt[..., 1] / qt[..., 0]
    v = qt[..., 2] / qt[..., 0]
    q_phys = qt / invj[..., None]
    p = (GAMMA - 1.0) * (q_phys[..., 3] - 0.5 * prim_rho * (u * u + v * v))
    h = (q_phys[..., 3] + p) / prim_rho
    c = np.sqrt(GAMMA * p / prim_rho)
    # transformed flux F~ = mx*F + my*G, written out per component
    ft = np.empty_like(qt)
    ft[..., 0] = mx * (prim_rho * u) + my * (prim_rho * v)
    ft[..., 1] = mx * (q_phys[..., 1] * u + p) + my * (q_phys[..., 1] * v)
    ft[..., 2] = mx * (q_phys[..., 2] * u) + my * (q_phys[..., 2] * v + p)
    ft[..., 3] = mx * ((q_phys[..., 3] + p) * u) + my * ((q_phys[..., 3] + p) * v)

    use_global = config.splitting == "global_lf"
    glam = np.zeros(4) if global_lam is None else np.asarray(global_lam, dtype=np.float64)
    if use_global and global_lam is None:
        raise ValueError("global_lf splitting needs the per-field domain maxima")

    nlines, nfaces = fvj.shape
    flux = np.empty((nlines, nfaces, 4))
    err = np.zeros((nlines, nfaces), dtype=np.int8)
    _sweep_kernel(qt, ft, invj, mx, my, prim_rho, u, v, h, c,
                  fmx, fmy, fvj,
                  FACE_NUMERATORS[config.metric_order],
                  FACE_DENOMINATOR[config.metric_order], field.ghost,
                  _SCHEME_IDS[config.scheme], config.fp,
                  config.weno_eps, config.weno_power, config.force_optimal_weights,
                  use_global, glam, config.lambda_floor,
                  field.metrics.fold_threshold, flux, err)
    if np.any(err):
        ln, f = np.argwhere(err)[0]
        raise GridFoldError(
            f"face 1/J below fold threshold (sweep axis {axis}, line {ln}, face {f})",
            where=(int(ln), int(f)))
    return flux
