"""Acceptance suite: one test (and one printed PASS/FAIL line) per criterion.

Run with ``pytest tests/test_acceptance.py -v -s``.  The vortex ladder and
the shock cases march real simulations; expect minutes-to-hours on one core
(the 321x321 vortex runs dominate).
"""

import numpy as np
import pytest

from conftest import FREE_STREAM, make_field, scheme, smooth_field_fn
from fpcurv import euler, weno
from fpcurv.grids import generate_random_grid, generate_wavy_grid
from fpcurv.harness import (
    run_double_mach,
    run_free_stream,
    run_scl_check,
    run_supersonic_cylinder,
    run_vortex,
)
from fpcurv.reconstruction import (
    characteristic_system,
    face_flux,
    fp_decomposition_diagnostic,
    splitting_lambdas,
)
from fpcurv.solver import build_sweep_windows, fill_ghosts, freestream_all, rk3_step
from fpcurv.sweep import fused_sweep


def _criterion(number, description, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    line = f"ACCEPTANCE {number}: {status} - {description}"
    if detail:
        line += f"  [{detail}]"
    print(line, flush=True)
    assert ok, line
    return ok


# --- criterion 1: free-stream preservation -------------------------

def test_criterion_1_free_stream_preservation():
    ok = True
    details = []
    for name, order in (("weno5", 6), ("weno7", 6), ("weno7", 8)):
        rep = run_free_stream(name, fp=True, metric_order=order)
        for grid_kind in ("wavy", "random"):
            l2, linf = rep.norms[f"{grid_kind}.v"]
            ok &= l2 <= 1e-13 and linf <= 1e-13
            details.append(f"{rep.scheme_label}/{grid_kind}: {linf:.1e}")
    rep = run_free_stream("weno5", fp=False, metric_order=6)
    l2_ctrl = rep.norms["wavy.v"][0]
    ok &= 5e-3 <= l2_ctrl <= 1e-1
    details.append(f"WENO5 control: {l2_ctrl:.2e}")
    _criterion(1, "free-stream preservation at machine zero on both grids", ok,
               "; ".join(details))


# --- criterion 2: metric-order independence of the FP property ------------------------

def test_criterion_2_metric_order_independence():
    ok = True
    details = []
    for name in ("weno5", "weno7"):
        for order in (2, 4, 8):
            rep = run_free_stream(name, fp=True, metric_order=order)
            worst = max(rep.norms["wavy.v"][1], rep.norms["random.v"][1])
            ok &= worst <= 1e-13
            details.append(f"{rep.scheme_label}: {worst:.1e}")
    _criterion(2, "FP errors stay at machine zero for metric orders 2/4/8", ok,
               "; ".join(details))


# --- criterion 3: vortex convergence ladder ---------------------------------

# The dt-invariance threshold is 2% here (default 0.1%): temporal error adds
# as C*dt^3 with C ~ 1.8e-4 measured, so a 2% stagnation stop leaves a
# temporal residual below 0.3% of the spatial error, shifting the log2 rates
# by < 0.03 against margins of 0.5+; the 0.1% default would need ~3e5 steps
# at 321^2 for WENO7-M8 without changing any pass/fail outcome.
VORTEX_RTOL = 0.02


@pytest.fixture(scope="module")
def vortex_w5m6():
    return run_vortex("weno5", fp=True, metric_order=6,
                      resolutions=(21, 41, 81, 161, 321), dt_refine_rtol=VORTEX_RTOL)


@pytest.fixture(scope="module")
def vortex_w7m8():
    return run_vortex("weno7", fp=True, metric_order=8, resolutions=(161, 321),
                      dt_refine_rtol=VORTEX_RTOL)


@pytest.fixture(scope="module")
def vortex_w5m2():
    return run_vortex("weno5", fp=True, metric_order=2, resolutions=(161, 321),
                      dt_refine_rtol=VORTEX_RTOL)


@pytest.fixture(scope="module")
def vortex_w5m4():
    return run_vortex("weno5", fp=True, metric_order=4, resolutions=(21, 41, 81),
                      dt_refine_rtol=VORTEX_RTOL)


def test_criterion_3_vortex_convergence(vortex_w5m6, vortex_w7m8, vortex_w5m2,
                                        vortex_w5m4):
    details = []
    rows = {n: (l2, r2) for n, l2, r2, _, _ in vortex_w5m6.convergence}
    rate_m6 = rows[321][1]
    l2_321 = rows[321][0]
    ok = rate_m6 >= 4.0
    details.append(f"WENO5-M6 161->321 order {rate_m6:.2f}")
    ok &= 3.02e-8 / 3.0 <= l2_321 <= 3.02e-8 * 3.0
    details.append(f"L2(321)={l2_321:.2e} (paper 3.02e-8)")

    rate_w7 = vortex_w7m8.convergence[-1][2]
    ok &= rate_w7 >= 6.0
    details.append(f"WENO7-M8 order {rate_w7:.2f}")

    rate_m2 = vortex_w5m2.convergence[-1][2]
    ok &= 1.5 <= rate_m2 <= 2.5
    details.append(f"WENO5-M2 order {rate_m2:.2f}")

    rows_m4 = {n: l2 for n, l2, _, _, _ in vortex_w5m4.convergence}
    agree = True
    for n in (21, 41, 81):
        ratio = rows_m4[n] / rows[n][0]
        agree &= 1.0 / 1.5 <= ratio <= 1.5
        details.append(f"M4/M6@{n}: {ratio:.2f}")
    ok &= agree
    _criterion(3, "vortex ladder orders and error levels", ok,
               "; ".join(details))


# --- criterion 4: Cartesian equivalence ------------------------------

def test_criterion_4_cartesian_equivalence():
    grid = generate_wavy_grid(24, 20, (0.0, 23.0, 0.0, 19.0), amp_x=0.0, amp_y=0.0,
                              ghost=9)
    field = make_field(grid, 6, smooth_field_fn)
    fill_ghosts(field, freestream_all(FREE_STREAM), 0.0)
    ok = True
    details = []
    for name in ("weno5", "linear_upwind5"):
        worst = 0.0
        for axis in (0, 1):
            fp = fused_sweep(field, axis, scheme(name, fp=True, order=6))
            std = fused_sweep(field, axis, scheme(name, fp=False, order=6))
            worst = max(worst, float(np.max(np.abs(fp - std))))
        scale = max(1.0, float(np.max(np.abs(std))))
        ok &= worst <= 1e-14 * scale
        details.append(f"{name}: {worst:.2e}")
    _criterion(4, "FP == standard on a uniform Cartesian grid, every face", ok,
               "; ".join(details))


# --- criterion 5: Appendix identities ---------------------------------------------

def test_criterion_5_appendix_identities():
    grid = generate_random_grid(35, 31, (0.0, 34.0, 0.0, 30.0), 0.2, seed=17, ghost=9)
    field = make_field(grid, 6, smooth_field_fn)
    fill_ghosts(field, freestream_all(FREE_STREAM), 0.0)
    cfg = scheme("weno5", fp=True, order=6)
    window, _, _ = build_sweep_windows(field, 0, cfg)
    assert window.q_tilde.shape[0] >= 1000
    sys = characteristic_system(window)
    lam = splitting_lambdas(window, cfg)
    scale = max(1.0, float(np.max(np.abs(window.f_tilde))))

    dec = fp_decomposition_diagnostic(window, sys, lam, cfg)
    fhat_ok = float(np.max(np.abs(dec.f_hat))) <= 1e-14 * scale

    from dataclasses import replace
    from test_reconstruction import _eq44_fp_form

    cfg_opt = replace(cfg, force_optimal_weights=True)
    flux = face_flux(window, sys, lam, cfg_opt)
    oracle = _eq44_fp_form(window, sys, lam, 6)
    eq44_ok = float(np.max(np.abs(flux - oracle))) <= 1e-13 * scale
    _criterion(5, "F_hat = 0 at 6th-order metrics; optimal weights recover Eq-44 form",
               fhat_ok and eq44_ok,
               f"max|F_hat|={np.max(np.abs(dec.f_hat)):.2e}, "
               f"eq44 diff={np.max(np.abs(flux - oracle)):.2e}, "
               f"windows={window.q_tilde.shape[0]}")


# --- criterion 6: SCL residuals -----------------------------------------------------

def test_criterion_6_scl_residuals():
    rep = run_scl_check(n=10, amplitude_fraction=0.2, seed=3)
    matched = [rep.extras[f"matched_order{o}"] for o in (2, 4, 6, 8)]
    mism = rep.extras["mismatched"]
    ok = all(m <= 1e-13 for m in matched) and mism >= 1e-6
    _criterion(6, "3D SCL residuals: matched orders ~0, mismatched orders violate", ok,
               f"matched max {max(matched):.1e}, mismatched {mism:.1e}")


# --- criterion 7: double Mach reflection --------------------------------------------

@pytest.fixture(scope="module")
def dmr_runs():
    fp5 = run_double_mach("weno5", fp=True, metric_order=6)
    fp7 = run_double_mach("weno7", fp=True, metric_order=6)
    std5 = run_double_mach("weno5", fp=False, metric_order=6)
    return fp5, fp7, std5


def test_criterion_7_double_mach(dmr_runs):
    fp5, fp7, std5 = dmr_runs
    details = []
    ok = True
    for rep in (fp5, fp7):
        ok &= rep.stable and rep.extras["rho_min"] > 0.0 and rep.extras["rho_max"] <= 25.0
        details.append(f"{rep.scheme_label}: rho in [{rep.extras['rho_min']:.2f}, "
                       f"{rep.extras['rho_max']:.2f}] in {rep.extras.get('steps', '?')} steps")
    noise_fp = fp5.extras["smooth_noise_rho"]
    noise_std = std5.extras["smooth_noise_rho"]
    ok &= noise_fp <= noise_std / 10.0
    details.append(f"smooth-region noise fp={noise_fp:.2e} vs std={noise_std:.2e}")
    _criterion(7, "double Mach completes with bounded density; FP noise <= std/10", ok,
               "; ".join(details))


# --- criterion 8: supersonic cylinder --------------------------------------------------

@pytest.fixture(scope="module")
def cylinder_runs():
    fp = run_supersonic_cylinder("weno5", fp=True, metric_order=6)
    std = run_supersonic_cylinder("weno5", fp=False, metric_order=6)
    return fp, std


def test_criterion_8_supersonic_cylinder(cylinder_runs):
    fp, std = cylinder_runs
    ok = fp.extras["steady"]
    ok &= fp.extras["step0_rhs_max"] <= 1e-13
    noise_fp = fp.extras["upstream_noise_v"]
    noise_std = std.extras["upstream_noise_v"]
    ok &= noise_std >= 10.0 * noise_fp
    _criterion(8, "cylinder reaches steady flag; step-0 FP RHS ~0; upstream noise ratio",
               ok,
               f"steady={fp.extras['steady']} in {fp.extras['steps']} steps, "
               f"step0 RHS {fp.extras['step0_rhs_max']:.2e}, "
               f"noise fp={noise_fp:.2e} std={noise_std:.2e}")


# --- criterion 9: kernel unit suite ------------------------------------------------------

def test_criterion_9_kernel_units():
    rng = np.random.default_rng(42)
    details = []

    f5 = rng.normal(size=(100_000, 5)) * rng.lognormal(0, 2, size=(100_000, 1))
    w5 = weno.weno5_weights(f5)
    f7 = rng.normal(size=(100_000, 7)) * rng.lognormal(0, 2, size=(100_000, 1))
    w7 = weno.weno7_weights(f7)
    weights_ok = (np.all(w5 >= 0) and np.max(np.abs(w5.sum(axis=-1) - 1)) < 1e-12
                  and np.all(w7 >= 0) and np.max(np.abs(w7.sum(axis=-1) - 1)) < 1e-12)
    details.append("weights normalized on 1e5 stencils")

    n = 10_000
    prim = np.empty((n, 4))
    prim[:, 0] = rng.uniform(0.1, 5.0, n)
    prim[:, 1] = rng.uniform(-3.0, 3.0, n)
    prim[:, 2] = rng.uniform(-3.0, 3.0, n)
    prim[:, 3] = rng.uniform(0.1, 10.0, n)
    cons = euler.primitive_to_conserved(prim)
    normal = rng.uniform(-2.0, 2.0, (n, 2))
    normal[np.hypot(normal[:, 0], normal[:, 1]) < 0.1] = (1.0, 0.3)
    sys = euler.eigensystem(euler.roe_average(cons, cons), normal)
    rl_err = float(np.max(np.abs(sys.right @ sys.left - np.eye(4))))
    a_eig = sys.right @ (sys.lam[..., None] * sys.left)
    a_exact = euler.flux_jacobian(cons, normal)
    scale = np.maximum(np.max(np.abs(a_exact), axis=(-2, -1), keepdims=True), 1e-10)
    jac_err = float(np.max(np.abs(a_eig - a_exact) / scale))
    eps = 1e-7
    fd_err = 0.0
    for k in range(4):
        dq = np.zeros(4)
        dq[k] = eps
        fd = (euler.transformed_flux(cons + dq, normal)
              - euler.transformed_flux(cons - dq, normal)) / (2 * eps)
        fd_err = max(fd_err, float(np.max(np.abs(a_exact[..., k] - fd)
                                          / np.maximum(scale[..., 0], 1.0))))
    eig_ok = rl_err < 1e-12 and jac_err < 1e-10 and fd_err < 1e-6
    details.append(f"RL-I {rl_err:.1e}, jac {jac_err:.1e}, fd {fd_err:.1e} on 1e4 states")

    grid = generate_wavy_grid(12, 12, (0.0, 11.0, 0.0, 11.0), amp_x=0.0, amp_y=0.0,
                              ghost=6)
    field = make_field(grid, 6)
    errs = []
    for nsteps in (10, 20, 40):
        work = field.copy()
        dt = 1.0 / nsteps
        for _ in range(nsteps):
            work = rk3_step(work, dt, rhs_fn=lambda f, t: -f.q_tilde[
                f.ghost:f.ghost + 12, f.ghost:f.ghost + 12, :], validate=False)
        g = work.ghost
        errs.append(abs(work.q_tilde[g + 2, g + 3, 0]
                        - field.q_tilde[g + 2, g + 3, 0] * np.exp(-1.0)))
    order = float(np.log2(errs[1] / errs[2]))
    rk_ok = abs(order - 3.0) <= 0.1
    details.append(f"RK3 observed order {order:.2f}")

    _criterion(9, "kernel unit suite (weights, eigensystem, RK3 order)",
               weights_ok and eig_ok and rk_ok, "; ".join(details))
