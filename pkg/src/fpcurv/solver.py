"""Semi-discrete RHS assembly, boundary fill, and TVD-RK3 time stepping.

The solver evolves Q~ = Q/J at the grid nodes.  One right-hand-side
evaluation is two dimension-by-dimension sweeps: along each index line,
faces are reconstructed by the configured scheme and the RHS is the
telescoping face-flux difference with unit computational spacing,

    dQ~/dt = -(F~_{i+1/2} - F~_{i-1/2}) - (G~_{j+1/2} - G~_{j-1/2}).

Ghost states are filled in physical Q space and converted with the local
ghost 1/J, so every boundary kind composes with the metric machinery.
"""

from dataclasses import dataclass, replace

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import euler
from .errors import InvalidStateError
from .grids import load_grid, save_grid
from .reconstruction import (
    StencilWindow,
    characteristic_system,
    face_flux,
    splitting_lambdas,
)

SIDES = ("imin", "imax", "jmin", "jmax")


# --- boundary kinds -------------------------------------------------------

@dataclass
class Periodic:
    pass


@dataclass
class SlipWall:
    pass


@dataclass
class Inflow:
    """Supersonic inflow: the full primitive state is pinned in the ghosts."""

    state: np.ndarray


@dataclass
class Outflow:
    """Supersonic outflow: ghost state copied from the nearest interior node."""


@dataclass
class DirichletFn:
    """Time-dependent exact state: fn(x, y, t) -> primitive array (..., 4)."""

    fn: object


@dataclass
class Segmented:
    """Piecewise boundary along the side, selected by node x coordinate.

    segments: list of (x_lo, x_hi, kind) applied where x_lo <= x < x_hi.
    """

    segments: list


@dataclass
class BoundarySpec:
    imin: object
    imax: object
    jmin: object
    jmax: object

    def side(self, name):
        return getattr(self, name)

    def validate(self):
        for axis, (lo, hi) in enumerate((("imin", "imax"), ("jmin", "jmax"))):
            a, b = self.side(lo), self.side(hi)
            if isinstance(a, Periodic) != isinstance(b, Periodic):
                raise ValueError(f"periodic sides must come in matched pairs (axis {axis})")
        return self


def periodic_all():
    return BoundarySpec(Periodic(), Periodic(), Periodic(), Periodic())


def freestream_all(prim):
    s = np.asarray(prim, dtype=np.float64)
    return BoundarySpec(Inflow(s), Inflow(s), Inflow(s), Inflow(s))


# --- conserved field ------------------------------------------------------

@dataclass
class ConservedField:
    """Q~ = Q/J on the padded node grid, plus the geometry it lives on."""

    q_tilde: np.ndarray
    grid: object
    metrics: object
    time: float = 0.0

    @property
    def ghost(self):
        return self.grid.ghost

    @property
    def fill_depth(self):
        return self.metrics.valid_ghost

    def interior_q(self):
        """Physical conserved vector on interior nodes."""
        g = self.grid
        qt = g.interior(self.q_tilde)
        vj = g.interior(self.metrics.inv_jacobian)
        return qt / vj[..., None]

    def interior_primitive(self):
        return euler.conserved_to_primitive(self.interior_q())

    def copy(self):
        return replace(self, q_tilde=self.q_tilde.copy())


def initialize_field(grid, metrics, prim_fn, time=0.0):
    """Sample a primitive-state function of (x, y) over the valid region."""
    qt = np.full(grid.x.shape + (4,), np.nan)
    d = metrics.valid_ghost
    g = grid.ghost
    sl = tuple(slice(g - d, g + n + d) for n in grid.dims)
    prim = prim_fn(grid.x[sl], grid.y[sl])
    cons = euler.primitive_to_conserved(prim)
    qt[sl] = cons * metrics.inv_jacobian[sl][..., None]
    return ConservedField(q_tilde=qt, grid=grid, metrics=metrics, time=time)


# --- ghost fill -----------------------------------------------------------

def _side_indices(field, side):
    """(axis, ghost indices ordered inward->outward, matching sources)."""
    g = field.ghost
    axis = 0 if side in ("imin", "imax") else 1
    n = field.grid.dims[axis]
    depth = field.fill_depth
    if side.endswith("min"):
        ghosts = [g - k for k in range(1, depth + 1)]
        mirror = [g + k for k in range(1, depth + 1)]
        edge = g
        wrap = [g + n - 1 - k for k in range(1, depth + 1)]
    else:
        ghosts = [g + n - 1 + k for k in range(1, depth + 1)]
        mirror = [g + n - 1 - k for k in range(1, depth + 1)]
        edge = g + n - 1
        wrap = [g + k for k in range(1, depth + 1)]
    return axis, ghosts, mirror, edge, wrap


def _take(arr, axis, idx):
    sl = [slice(None)] * arr.ndim
    sl[axis] = idx
    return tuple(sl)


def _apply_side(field, side, kind, t, span):
    """Fill ghosts of one side over the index range ``span`` of the other axis."""
    qt = field.q_tilde
    invj = field.metrics.inv_jacobian
    grid = field.grid
    axis, ghosts, mirror, edge, wrap = _side_indices(field, side)
    other = 1 - axis

    def spanned(sel):
        out = list(sel)
        out[other] = span
        return tuple(out)

    if isinstance(kind, Periodic):
        for gi, src in zip(ghosts, wrap):
            dst = spanned(_take(qt, axis, gi))
            s = spanned(_take(qt, axis, src))
            q_phys = qt[s] / invj[s[:2]][..., None]
            qt[dst] = q_phys * invj[dst[:2]][..., None]
    elif isinstance(kind, (Inflow, DirichletFn)):
        for gi in ghosts:
            dst = spanned(_take(qt, axis, gi))
            csl = dst[:2]
            if isinstance(kind, Inflow):
                prim = np.broadcast_to(kind.state, grid.x[csl].shape + (4,))
            else:
                prim = kind.fn(grid.x[csl], grid.y[csl], t)
            cons = euler.primitive_to_conserved(prim)
            qt[dst] = cons * invj[csl][..., None]
    elif isinstance(kind, Outflow):
        src = spanned(_take(qt, axis, edge))
        q_edge = qt[src] / invj[src[:2]][..., None]
        for gi in ghosts:
            dst = spanned(_take(qt, axis, gi))
            qt[dst] = q_edge * invj[dst[:2]][..., None]
    elif isinstance(kind, SlipWall):
        # unit wall normal from the wall-node metric row of this axis
        ncomp = field.metrics.center[axis]
        wsl = spanned(_take(invj, axis, edge))
        nxw = ncomp[0][wsl]
        nyw = ncomp[1][wsl]
        mag = np.hypot(nxw, nyw)
        nxw, nyw = nxw / mag, nyw / mag
        for gi, src in zip(ghosts, mirror):
            s = spanned(_take(qt, axis, src))
            dst = spanned(_take(qt, axis, gi))
            q_img = qt[s] / invj[s[:2]][..., None]
            prim = euler.conserved_to_primitive(q_img)
            un = prim[..., 1] * nxw + prim[..., 2] * nyw
            prim[..., 1] -= 2.0 * un * nxw
            prim[..., 2] -= 2.0 * un * nyw
            cons = euler.primitive_to_conserved(prim)
            qt[dst] = cons * invj[dst[:2]][..., None]
    elif isinstance(kind, Segmented):
        x_edge = grid.x[_take(grid.x, axis, edge)]  # boundary-node x along the side
        span_idx = np.arange(qt.shape[other])[span]
        for x_lo, x_hi, sub in kind.segments:
            mask = (x_edge[span_idx] >= x_lo) & (x_edge[span_idx] < x_hi)
            seg = span_idx[mask]
            if seg.size:
                _apply_side(field, side, sub, t, seg)
    else:
        raise TypeError(f"unknown boundary kind {kind!r}")


def fill_ghosts(field, bc, t=None):
    """Populate ghost layers of Q~ per the boundary spec; returns the field.

    The j sides are filled first over interior i, then the i sides over the
    full padded j range so corner regions are defined for both sweeps.
    """
    t = field.time if t is None else t
    g = field.ghost
    d = field.fill_depth
    nx, ny = field.grid.dims
    for side in ("jmin", "jmax"):
        _apply_side(field, side, bc.side(side), t, slice(g, g + nx))
    for side in ("imin", "imax"):
        _apply_side(field, side, bc.side(side), t, slice(g - d, g + ny + d))
    return field


# --- sweeps and RHS -------------------------------------------------------

def _sweep_arrays(field, axis, config):
    """Line-major padded views for one sweep direction.

    Returns (qt, invj, mx, my, fmx, fmy, fvj): qt is (L, N, 4) with N the
    padded extent along the sweep axis; face arrays are (L, nfaces) for the
    nx+1 faces bracketing the interior nodes.
    """
    g = field.ghost
    n_int = field.grid.dims[axis]
    metrics = field.metrics
    other = 1 - axis
    lines = slice(g, g + field.grid.dims[other])

    # node arrays: organize as (lines, nodes-along-axis)
    if axis == 0:
        qt = np.ascontiguousarray(np.transpose(field.q_tilde[:, lines, :], (1, 0, 2)))
        invj = np.ascontiguousarray(metrics.inv_jacobian[:, lines].T)
        mx = np.ascontiguousarray(metrics.center[0, 0][:, lines].T)
        my = np.ascontiguousarray(metrics.center[0, 1][:, lines].T)
    else:
        qt = np.ascontiguousarray(field.q_tilde[lines, :, :])
        invj = np.ascontiguousarray(metrics.inv_jacobian[lines, :])
        mx = np.ascontiguousarray(metrics.center[1, 0][lines, :])
        my = np.ascontiguousarray(metrics.center[1, 1][lines, :])

    fmetric, finvj = metrics.face(axis, config.metric_order)
    fslice = slice(g - 1, g + n_int)
    if axis == 0:
        fmx = np.ascontiguousarray(fmetric[0][fslice, lines].T)
        fmy = np.ascontiguousarray(fmetric[1][fslice, lines].T)
        fvj = np.ascontiguousarray(finvj[fslice, lines].T)
    else:
        fmx = np.ascontiguousarray(fmetric[0][lines, fslice])
        fmy = np.ascontiguousarray(fmetric[1][lines, fslice])
        fvj = np.ascontiguousarray(finvj[lines, fslice])
    return qt, invj, mx, my, fmx, fmy, fvj


def build_sweep_windows(field, axis, config):
    """Batched StencilWindow for every face of one sweep direction.

    Faces run over i+1/2 for i in [-1, n-1] on every interior line of the
    other axis; the batch is ordered line-major.  Ghosts must be filled.
    """
    qt, invj, mx, my, fmx, fmy, fvj = _sweep_arrays(field, axis, config)
    g = field.ghost
    n_int = field.grid.dims[axis]
    nlines = invj.shape[0]
    w = config.window_width
    nfaces = n_int + 1

    f_node = euler.transformed_flux(qt / invj[..., None],
                                    np.stack([mx, my], axis=-1))
    start = g - 1 - (w // 2 - 1)  # window start for the first face
    qwin = sliding_window_view(qt, w, axis=1)[:, start:start + nfaces]
    fwin = sliding_window_view(f_node, w, axis=1)[:, start:start + nfaces]
    jwin = sliding_window_view(invj, w, axis=1)[:, start:start + nfaces]
    mxwin = sliding_window_view(mx, w, axis=1)[:, start:start + nfaces]
    mywin = sliding_window_view(my, w, axis=1)[:, start:start + nfaces]

    nf = nlines * nfaces
    window = StencilWindow(
        q_tilde=np.ascontiguousarray(np.moveaxis(qwin, -1, 2)).reshape(nf, w, 4),
        f_tilde=np.ascontiguousarray(np.moveaxis(fwin, -1, 2)).reshape(nf, w, 4),
        inv_j=jwin.reshape(nf, w),
        node_metrics=np.stack([mxwin.reshape(nf, w), mywin.reshape(nf, w)], axis=-1),
        face_metrics=np.stack([fmx.reshape(nf), fmy.reshape(nf), fvj.reshape(nf)], axis=-1),
        fold_threshold=field.metrics.fold_threshold,
    )
    return window, nlines, nfaces


def _reference_sweep(field, axis, config, global_lam=None):
    """Face fluxes via the batched-numpy reference reconstruction."""
    window, nlines, nfaces = build_sweep_windows(field, axis, config)
    sys = characteristic_system(window)
    lam = splitting_lambdas(window, config, global_lam)
    flux = face_flux(window, sys, lam, config).reshape(nlines, nfaces, 4)
    return flux


def global_lambdas(field, axis, config):
    """Per-field domain max of the contravariant eigenvalue magnitudes."""
    qt, invj, mx, my, fmx, fmy, fvj = _sweep_arrays(field, axis, config)
    tx, ty = fmx / fvj, fmy / fvj
    tmag = np.hypot(tx, ty)
    g = field.ghost
    lam = np.zeros(4)
    for shift in (0, 1):
        nodes = slice(g - 1 + shift, g + field.grid.dims[axis] + shift)
        q = qt[:, nodes, :] / invj[:, nodes, None]
        u = q[..., 1] / q[..., 0]
        v = q[..., 2] / q[..., 0]
        c = euler.sound_speed(q)
        un = tx * u + ty * v
        lam = np.maximum(lam, [np.max(np.abs(un - c * tmag)), np.max(np.abs(un)),
                               np.max(np.abs(un)), np.max(np.abs(un + c * tmag))])
    return lam


def compute_rhs(field, config, bc=None, t=None, global_lams=None, backend="auto"):
    """dQ~/dt on interior nodes.  Fills ghosts first when ``bc`` is given."""
    if bc is not None:
        fill_ghosts(field, bc, t)
    if config.splitting == "global_lf" and global_lams is None:
        global_lams = [global_lambdas(field, ax, config) for ax in (0, 1)]
    rhs = None
    for axis in (0, 1):
        glam = None if global_lams is None else global_lams[axis]
        flux = _sweep(field, axis, config, glam, backend)
        diff = flux[:, 1:, :] - flux[:, :-1, :]
        if axis == 0:
            diff = np.transpose(diff, (1, 0, 2))
        rhs = -diff if rhs is None else rhs - diff
    return rhs


def _sweep(field, axis, config, global_lam, backend):
    if backend == "reference":
        return _reference_sweep(field, axis, config, global_lam)
    if backend in ("auto", "numba"):
        try:
            from . import sweep as _fast
            return _fast.fused_sweep(field, axis, config, global_lam)
        except ImportError:
            if backend == "numba":
                raise
    return _reference_sweep(field, axis, config, global_lam)


# --- time stepping --------------------------------------------------------

def _validate_interior(field, stage):
    q = field.interior_q()
    rho = q[..., 0]
    p = euler.pressure(q)
    bad = ~(np.isfinite(p) & np.isfinite(rho) & (rho > 0.0) & (p > 0.0))
    if np.any(bad):
        idx = tuple(int(v) for v in np.argwhere(bad)[0])
        raise InvalidStateError(
            f"invalid state (rho={rho[idx]:.3e}, p={p[idx]:.3e}) at cell {idx}, RK stage {stage}",
            where=idx, stage=stage)


def rk3_step(field, dt, rhs_fn=None, config=None, bc=None, backend="auto",
             validate=True):
    """One SSP-RK3 step; each stage is a convex combination of Euler updates.

    ``rhs_fn(field, t) -> dQ~/dt`` may be supplied directly (used by the
    order tests); otherwise it is assembled from (config, bc).
    """
    if rhs_fn is None:
        global_lams = None
        if config.splitting == "global_lf":
            fill_ghosts(field, bc, field.time)
            global_lams = [global_lambdas(field, ax, config) for ax in (0, 1)]

        def rhs_fn(f, t):
            return compute_rhs(f, config, bc=bc, t=t, global_lams=global_lams,
                               backend=backend)

    g = field.ghost
    grid = field.grid
    sl = tuple(slice(g, g + n) for n in grid.dims)
    t0 = float(field.time)
    q0 = field.q_tilde[sl].copy()

    work = field.copy()
    # increment form of the Shu-Osher stages: q0 + a * (euler_update - q0);
    # a zero RHS leaves the field bitwise unchanged
    for stage, (t_stage, a_new) in enumerate(
            [(t0, 1.0), (t0 + dt, 0.25), (t0 + 0.5 * dt, 2.0 / 3.0)]):
        work.time = t_stage
        rhs = rhs_fn(work, t_stage)
        updated = work.q_tilde[sl] + dt * rhs
        work.q_tilde[sl] = q0 + a_new * (updated - q0)
        if validate:
            _validate_interior(work, stage)
    work.time = t0 + dt
    return work


def spectral_radius(field, axis):
    """max over interior nodes of |Theta . u| + c |Theta| for one direction."""
    grid = field.grid
    q = field.interior_q()
    u = q[..., 1] / q[..., 0]
    v = q[..., 2] / q[..., 0]
    c = euler.sound_speed(q)
    invj = grid.interior(field.metrics.inv_jacobian)
    tx = grid.interior(field.metrics.center[axis, 0]) / invj
    ty = grid.interior(field.metrics.center[axis, 1]) / invj
    return np.max(np.abs(tx * u + ty * v) + c * np.hypot(tx, ty))


def compute_dt(field, cfl=None, fixed_dt=None):
    """cfl / max_cells sum_dir (|U_contravariant| + c |grad xi|); or fixed dt."""
    if fixed_dt is not None:
        return float(fixed_dt)
    grid = field.grid
    q = field.interior_q()
    u = q[..., 1] / q[..., 0]
    v = q[..., 2] / q[..., 0]
    c = euler.sound_speed(q)
    invj = grid.interior(field.metrics.inv_jacobian)
    radius = np.zeros_like(u)
    for axis in (0, 1):
        tx = grid.interior(field.metrics.center[axis, 0]) / invj
        ty = grid.interior(field.metrics.center[axis, 1]) / invj
        radius += np.abs(tx * u + ty * v) + c * np.hypot(tx, ty)
    return float(cfl / np.max(radius))


def save_checkpoint(field, path):
    """Grid text block followed by the interior conserved vectors."""
    grid_path = str(path) + ".grid"
    save_grid(field.grid, grid_path)
    q = field.interior_q()
    with open(path, "w") as fh:
        fh.write(f"fpcurv-checkpoint 1\ntime {field.time:.17g}\n")
        fh.write("grid " + grid_path + "\n")
        for row in q.reshape(-1, 4):
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def load_checkpoint(path, metric_order=6):
    from .metrics import compute_metrics_scmm

    with open(path) as fh:
        magic = fh.readline().split()
        if not magic or magic[0] != "fpcurv-checkpoint":
            raise ValueError(f"{path} is not an fpcurv checkpoint")
        time = float(fh.readline().split()[1])
        grid_path = fh.readline().split(maxsplit=1)[1].strip()
        data = np.loadtxt(fh).reshape(-1, 4)
    grid = load_grid(grid_path)
    metrics = compute_metrics_scmm(grid, metric_order)
    qt = np.full(grid.x.shape + (4,), np.nan)
    sl = tuple(slice(grid.ghost, grid.ghost + n) for n in grid.dims)
    cons = data.reshape(grid.dims + (4,))
    qt[sl] = cons * metrics.inv_jacobian[sl][..., None]
    return ConservedField(q_tilde=qt, grid=grid, metrics=metrics, time=time)
