"""Characteristic-wise face-flux reconstruction with reformulated dissipation.

The free-stream preserving (FP) variants subtract a reference face state
from every stencil entry before the unmodified upwind operator is applied:

    Q* = Q~_{i+1/2} / (1/J)_{i+1/2}          (reference conservative state)
    F~'_m = F~_m - F~*_m + F~*_{i+1/2}        (flux term)
    Q~'_m = Q~_m - Q* (1/J)_m + Q* (1/J)_{i+1/2}   (dissipation term)

with F~*_m built from Q*'s physical fluxes and the node metrics, and all
face interpolations sharing the metric discretization order.  Under a
uniform flow both modified arrays are constant along the stencil, so any
reconstruction that reproduces constants returns the same face value and
the flux differences telescope into the discrete surface conservation law.

This module is the batched-numpy reference implementation; the fused
production kernels in ``sweep`` are tested against it face by face.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import euler, weno
from .errors import GridFoldError
from .interp import FACE_DENOMINATOR, FACE_NUMERATORS, check_order

SCHEMES = ("linear_upwind5", "weno5", "weno7")
SPLITTINGS = ("local_lf", "global_lf")


@dataclass
class SchemeConfig:
    """Reconstruction scheme selection and its knobs."""

    scheme: str = "weno5"
    fp: bool = True
    metric_order: int = 6
    splitting: str = "local_lf"
    weno_eps: float = 1e-6
    weno_power: int = 2
    force_optimal_weights: bool = False
    lambda_floor: float = 0.0

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}, expected one of {SCHEMES}")
        if self.splitting not in SPLITTINGS:
            raise ValueError(f"unknown splitting {self.splitting!r}")
        check_order(self.metric_order)
        if self.weno_eps <= 0.0:
            raise ValueError("weno_eps must be positive")

    @property
    def scheme_width(self):
        """Nodes consumed by the reconstruction around one face."""
        return 8 if self.scheme == "weno7" else 6

    @property
    def window_width(self):
        """Nodes a stencil window must carry (reconstruction and metrics)."""
        return max(self.scheme_width, self.metric_order)

    @property
    def recon_halfwidth(self):
        return self.scheme_width // 2

    @property
    def label(self):
        names = {"linear_upwind5": "Linear-Upwind5", "weno5": "WENO5", "weno7": "WENO7"}
        base = names[self.scheme]
        return f"{base}-M{self.metric_order}" if self.fp else base


@dataclass
class StencilWindow:
    """Everything one face reconstruction needs, batched over faces.

    q_tilde, f_tilde : (F, W, 4) node values of Q/J and the transformed flux
    inv_j            : (F, W) node 1/J
    node_metrics     : (F, W, 2) node (xi_x/J, xi_y/J) for the sweep direction
    face_metrics     : (F, 3) face-interpolated (xi_x/J, xi_y/J, 1/J) at i+1/2
    fold_threshold   : scalar guard for the Q* division

    The face sits between window nodes W/2-1 and W/2.
    """

    q_tilde: np.ndarray
    f_tilde: np.ndarray
    inv_j: np.ndarray
    node_metrics: np.ndarray
    face_metrics: np.ndarray
    fold_threshold: float = 0.0

    @property
    def width(self):
        return self.q_tilde.shape[1]

    @property
    def center(self):
        """Index of node i (the face is at i+1/2)."""
        return self.width // 2 - 1


def characteristic_system(window):
    """Roe-averaged eigensystem at the face, from the face metric normal."""
    c0 = window.center
    q_l = window.q_tilde[:, c0, :] / window.inv_j[:, c0, None]
    q_r = window.q_tilde[:, c0 + 1, :] / window.inv_j[:, c0 + 1, None]
    avg = euler.roe_average(q_l, q_r)
    return euler.eigensystem(avg, window.face_metrics[:, :2])


def splitting_lambdas(window, config, global_lam=None):
    """Per-face, per-field dissipation eigenvalue magnitudes.

    Uses the unscaled metric gradient Theta = face metric / face (1/J), the
    eigenvalues of the Jacobian with respect to Q~ that the splitting
    linearizes.  Local LF takes the max magnitude over the two end nodes of
    the reconstruction stencil; global LF broadcasts the supplied
    per-field domain max.
    """
    if config.splitting == "global_lf":
        if global_lam is None:
            raise ValueError("global_lf splitting needs the per-field domain maxima")
        lam = np.broadcast_to(np.asarray(global_lam, dtype=np.float64),
                              (window.q_tilde.shape[0], 4)).copy()
    else:
        vjf = window.face_metrics[:, 2]
        theta = window.face_metrics[:, :2] / vjf[:, None]
        tmag = np.hypot(theta[:, 0], theta[:, 1])
        c0 = window.center
        half = config.recon_halfwidth
        lam = np.zeros((window.q_tilde.shape[0], 4))
        for m in (c0 - half + 1, c0 + half):
            q = window.q_tilde[:, m, :] / window.inv_j[:, m, None]
            u = q[:, 1] / q[:, 0]
            v = q[:, 2] / q[:, 0]
            c = euler.sound_speed(q)
            un = theta[:, 0] * u + theta[:, 1] * v
            cand = np.stack([np.abs(un - c * tmag), np.abs(un), np.abs(un),
                             np.abs(un + c * tmag)], axis=-1)
            lam = np.maximum(lam, cand)
    if config.lambda_floor > 0.0:
        lam = np.maximum(lam, config.lambda_floor)
    return lam


def reference_face_state(window, metric_order):
    """Q* = Q~_{i+1/2} / (1/J)_{i+1/2}, both at the metric order.

    Where the high-order interpolation ratio leaves the admissible set
    (the oscillatory face value across a strong discontinuity can decode
    to negative density or pressure), the face falls back to the two-point
    ratio (Q~_i + Q~_{i+1}) / ((1/J)_i + (1/J)_{i+1}).  That is a convex
    combination of the adjacent (valid) node states, hence admissible, and
    it still reproduces a uniform flow exactly, so the free-stream
    property is untouched.
    """
    metric_order = check_order(metric_order)
    c0 = window.center
    half = metric_order // 2
    sl = slice(c0 - half + 1, c0 + half + 1)
    qt_face = np.einsum("k,fkv->fv", FACE_NUMERATORS[metric_order],
                        window.q_tilde[:, sl, :]) / FACE_DENOMINATOR[metric_order]
    vjf = window.face_metrics[:, 2]
    if np.any(vjf <= window.fold_threshold):
        idx = int(np.argwhere(vjf <= window.fold_threshold)[0][0])
        raise GridFoldError(f"face 1/J below fold threshold at window {idx}", where=idx)
    qstar = qt_face / vjf[:, None]
    rho = qstar[..., 0]
    p = (euler.GAMMA - 1.0) * (qstar[..., 3] - 0.5 * (qstar[..., 1] ** 2
                                                      + qstar[..., 2] ** 2) / rho)
    bad = ~((rho > 0.0) & (p > 0.0))
    if np.any(bad):
        pair = (window.q_tilde[:, c0, :] + window.q_tilde[:, c0 + 1, :]) \
            / (window.inv_j[:, c0] + window.inv_j[:, c0 + 1])[:, None]
        qstar = np.where(bad[:, None], pair, qstar)
    return qstar


@dataclass
class FpTerms:
    """The reference-state pieces of the reformulated dissipation."""

    qstar: np.ndarray        # (F, 4)
    f_star_m: np.ndarray     # (F, W, 4) node F~* from node metrics
    f_star_face: np.ndarray  # (F, 4) face F~* from face metrics
    q_star_m: np.ndarray     # (F, W, 4) Q* (1/J)_m
    q_star_face: np.ndarray  # (F, 4) Q* (1/J)_{i+1/2}


def fp_terms(window, config):
    qstar = reference_face_state(window, config.metric_order)
    f_star = euler.physical_flux(qstar, 0)
    g_star = euler.physical_flux(qstar, 1)
    mx = window.node_metrics[..., 0]
    my = window.node_metrics[..., 1]
    return FpTerms(
        qstar=qstar,
        f_star_m=f_star[:, None, :] * mx[..., None] + g_star[:, None, :] * my[..., None],
        f_star_face=(f_star * window.face_metrics[:, 0, None]
                     + g_star * window.face_metrics[:, 1, None]),
        q_star_m=qstar[:, None, :] * window.inv_j[..., None],
        q_star_face=qstar * window.face_metrics[:, 2, None],
    )


def modified_window(window, config):
    """Apply the reformulated-dissipation substitution to the node arrays.

    Grouped as node value plus (face - node) reference correction: on a
    uniform Cartesian grid the correction is exactly zero, so the FP path
    reproduces the standard scheme bitwise.
    """
    if not config.fp:
        return window, None
    terms = fp_terms(window, config)
    out = replace(
        window,
        f_tilde=window.f_tilde + (terms.f_star_face[:, None, :] - terms.f_star_m),
        q_tilde=window.q_tilde + (terms.q_star_face[:, None, :] - terms.q_star_m),
    )
    return out, terms


def lf_split(window, sys, lam):
    """Characteristic Lax-Friedrichs split: f+-_m = L (F~_m +- lam Q~_m) / 2."""
    lf = np.einsum("fab,fmb->fma", sys.left, window.f_tilde)
    lq = np.einsum("fab,fmb->fma", sys.left, window.q_tilde)
    lamq = lam[:, None, :] * lq
    return 0.5 * (lf + lamq), 0.5 * (lf - lamq)


def _reconstruct_pair(plus, minus, config):
    """Apply the scheme to the plus window and the reversed minus window."""
    c0 = plus.shape[1] // 2 - 1
    if config.scheme == "weno7":
        p = plus[:, c0 - 3:c0 + 4, :]
        m = minus[:, c0 - 2:c0 + 5, :][:, ::-1, :]
        kern = lambda a: weno.weno7(np.moveaxis(a, 1, -1), config.weno_eps,
                                    config.weno_power, config.force_optimal_weights)
    elif config.scheme == "weno5":
        p = plus[:, c0 - 2:c0 + 3, :]
        m = minus[:, c0 - 1:c0 + 4, :][:, ::-1, :]
        kern = lambda a: weno.weno5(np.moveaxis(a, 1, -1), config.weno_eps,
                                    config.weno_power, config.force_optimal_weights)
    else:
        p = plus[:, c0 - 2:c0 + 3, :]
        m = minus[:, c0 - 1:c0 + 4, :][:, ::-1, :]
        kern = lambda a: weno.linear_upwind5(np.moveaxis(a, 1, -1))
    return kern(p) + kern(m)


def face_flux(window, sys, lam, config):
    """Reconstructed face flux F~_{i+1/2}, standard or FP per config."""
    mod, _ = modified_window(window, config)
    plus, minus = lf_split(mod, sys, lam)
    char = _reconstruct_pair(plus, minus, config)
    return np.einsum("fab,fb->fa", sys.right, char)


def fp_linear_upwind_face(window, sys, lam, config=None):
    """FP linear upwind face flux (the dissipation-only substitution)."""
    base = config or SchemeConfig(scheme="linear_upwind5", fp=True)
    return face_flux(window, sys, lam, replace(base, scheme="linear_upwind5", fp=True))


def fp_weno_face(window, sys, lam, config):
    return face_flux(window, sys, lam, replace(config, fp=True))


@dataclass
class FluxDecomposition:
    """Central/dissipation split of the FP-WENO5 face flux.

    total = central + dissipation; central = central6(F~) - f_hat; f_hat
    vanishes when the metrics and Jacobian are discretized at 6th order.
    """

    central: np.ndarray
    dissipation: np.ndarray
    f_hat: np.ndarray
    third_differences: np.ndarray

    @property
    def total(self):
        return self.central + self.dissipation


def _weight_correction(char6, config):
    """Deviation of the 5-point WENO value from the 6-point central value.

    char6: (F, 6, 4) characteristic node values ordered i-2 .. i+3.
    """
    x = np.moveaxis(char6, 1, -1)  # (F, 4, 6)
    if config.force_optimal_weights:
        w = np.broadcast_to(weno.WENO5_OPTIMAL, x.shape[:-1] + (3,))
    else:
        w = weno.weno5_weights(x[..., :5], config.weno_eps, config.weno_power)
    d1 = x[..., 3] - 3.0 * x[..., 2] + 3.0 * x[..., 1] - x[..., 0]
    d2 = x[..., 4] - 3.0 * x[..., 3] + 3.0 * x[..., 2] - x[..., 1]
    d3 = x[..., 5] - 3.0 * x[..., 4] + 3.0 * x[..., 3] - x[..., 2]
    corr = -((20.0 * w[..., 0] - 1.0) * d1
             - (10.0 * w[..., 0] + 10.0 * w[..., 1] - 5.0) * d2 + d3) / 60.0
    return corr, np.stack([d1, d2, d3], axis=-1)


def fp_decomposition_diagnostic(window, sys, lam, config):
    """Central/dissipation decomposition of the FP-WENO5 face flux."""
    if config.scheme != "weno5":
        raise ValueError("the decomposition diagnostic covers the 5th-order WENO scheme")
    config = replace(config, fp=True, scheme="weno5")
    c0 = window.center
    sl = slice(c0 - 2, c0 + 4)

    mod, terms = modified_window(window, config)
    f_star_nodes = np.moveaxis(terms.f_star_m[:, sl, :], 1, -1)
    f_hat = weno.central6(f_star_nodes) - terms.f_star_face
    central = weno.central6(np.moveaxis(window.f_tilde[:, sl, :], 1, -1)) - f_hat

    plus, minus = lf_split(mod, sys, lam)
    corr_p, d_p = _weight_correction(plus[:, sl, :], config)
    corr_m, d_m = _weight_correction(minus[:, sl, :][:, ::-1, :], config)
    dissipation = np.einsum("fab,fb->fa", sys.right, corr_p + corr_m)
    return FluxDecomposition(central=central, dissipation=dissipation, f_hat=f_hat,
                             third_differences=np.stack([d_p, d_m], axis=1))
