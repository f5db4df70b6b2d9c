import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpcurv import euler
from fpcurv.errors import InvalidStateError

FREE_STREAM = np.array([1.4, 0.5, 0.0, 1.0])  # rho, u, v, p


def random_primitives(rng, n):
    prim = np.empty((n, 4))
    prim[:, 0] = rng.uniform(0.1, 5.0, n)
    prim[:, 1] = rng.uniform(-3.0, 3.0, n)
    prim[:, 2] = rng.uniform(-3.0, 3.0, n)
    prim[:, 3] = rng.uniform(0.1, 10.0, n)
    return prim


def test_still_gas_energy():
    cons = euler.primitive_to_conserved(np.array([1.0, 0.0, 0.0, 1.0]))
    assert cons[3] == pytest.approx(2.5, abs=1e-15)


def test_free_stream_energy():
    cons = euler.primitive_to_conserved(FREE_STREAM)
    assert cons[3] == pytest.approx(2.675, abs=1e-14)
    assert np.allclose(euler.conserved_to_primitive(cons), FREE_STREAM, atol=1e-14)


@settings(max_examples=80, deadline=None)
@given(
    rho=st.floats(0.05, 20.0),
    u=st.floats(-5.0, 5.0),
    v=st.floats(-5.0, 5.0),
    p=st.floats(0.05, 50.0),
)
def test_roundtrip(rho, u, v, p):
    prim = np.array([rho, u, v, p])
    back = euler.conserved_to_primitive(euler.primitive_to_conserved(prim))
    assert np.allclose(back, prim, rtol=1e-14, atol=1e-14)


def test_negative_pressure_raises():
    cons = np.array([1.0, 3.0, 0.0, 1.0])  # rho E < kinetic energy
    with pytest.raises(InvalidStateError):
        euler.conserved_to_primitive(cons)


def test_physical_flux_at_rest():
    cons = euler.primitive_to_conserved(np.array([2.0, 0.0, 0.0, 3.0]))
    assert np.allclose(euler.physical_flux(cons, 0), [0.0, 3.0, 0.0, 0.0], atol=1e-14)
    assert np.allclose(euler.physical_flux(cons, 1), [0.0, 0.0, 3.0, 0.0], atol=1e-14)


def test_physical_flux_free_stream():
    cons = euler.primitive_to_conserved(FREE_STREAM)
    f = euler.physical_flux(cons, 0)
    assert np.allclose(f, [0.7, 1.35, 0.0, 1.8375], atol=1e-14)


def test_transformed_flux_reduces_to_f_and_g():
    rng = np.random.default_rng(0)
    cons = euler.primitive_to_conserved(random_primitives(rng, 12))
    fx = euler.physical_flux(cons, 0)
    fy = euler.physical_flux(cons, 1)
    ex = np.broadcast_to(np.array([1.0, 0.0]), (12, 2))
    ey = np.broadcast_to(np.array([0.0, 1.0]), (12, 2))
    assert np.allclose(euler.transformed_flux(cons, ex), fx, atol=1e-14)
    assert np.allclose(euler.transformed_flux(cons, ey), fy, atol=1e-14)


def test_transformed_flux_linearity():
    rng = np.random.default_rng(1)
    cons = euler.primitive_to_conserved(random_primitives(rng, 12))
    a = rng.uniform(-2, 2, 12)
    b = rng.uniform(-2, 2, 12)
    row = np.stack([a, b], axis=-1)
    direct = euler.transformed_flux(cons, row)
    comb = a[:, None] * euler.physical_flux(cons, 0) + b[:, None] * euler.physical_flux(cons, 1)
    assert np.allclose(direct, comb, rtol=1e-13, atol=1e-13)


def test_roe_average_consistency():
    cons = euler.primitive_to_conserved(FREE_STREAM)
    avg = euler.roe_average(cons, cons)
    p = FREE_STREAM[3]
    h = (cons[3] + p) / cons[0]
    assert avg.u == pytest.approx(0.5, abs=1e-14)
    assert avg.v == pytest.approx(0.0, abs=1e-14)
    assert avg.h == pytest.approx(h, abs=1e-14)


def test_roe_average_betweenness():
    rng = np.random.default_rng(2)
    left = euler.primitive_to_conserved(random_primitives(rng, 64))
    right = euler.primitive_to_conserved(random_primitives(rng, 64))
    avg = euler.roe_average(left, right)
    for attr, col in (("u", 1), ("v", 2)):
        lo = np.minimum(left[:, col] / left[:, 0], right[:, col] / right[:, 0])
        hi = np.maximum(left[:, col] / left[:, 0], right[:, col] / right[:, 0])
        val = getattr(avg, attr)
        assert np.all(val >= lo - 1e-12) and np.all(val <= hi + 1e-12)


def test_roe_property():
    """A_roe (QR - QL) = F~(QR) - F~(QL) for the transformed flux."""
    rng = np.random.default_rng(3)
    n = 256
    left = euler.primitive_to_conserved(random_primitives(rng, n))
    right = euler.primitive_to_conserved(random_primitives(rng, n))
    normal = rng.uniform(-1.5, 1.5, (n, 2))
    normal[np.hypot(normal[:, 0], normal[:, 1]) < 0.1] = (1.0, 0.2)
    sys = euler.eigensystem(euler.roe_average(left, right), normal)
    a_mat = sys.right @ (sys.lam[..., None] * sys.left)
    dq = right - left
    df = euler.transformed_flux(right, normal) - euler.transformed_flux(left, normal)
    lhs = np.einsum("fab,fb->fa", a_mat, dq)
    scale = np.maximum(np.max(np.abs(df), axis=-1, keepdims=True), 1e-3)
    assert np.max(np.abs(lhs - df) / scale) < 1e-8


def test_eigenvalues_1d_example():
    cons = euler.primitive_to_conserved(np.array([1.4, 0.5, 0.0, 1.0]))  # c = 1
    avg = euler.roe_average(cons, cons)
    sys = euler.eigensystem(avg, np.array([1.0, 0.0]))
    assert np.allclose(sys.lam, [-0.5, 0.5, 0.5, 1.5], atol=1e-12)


def _random_systems(n, seed):
    rng = np.random.default_rng(seed)
    left = euler.primitive_to_conserved(random_primitives(rng, n))
    right = euler.primitive_to_conserved(random_primitives(rng, n))
    normal = rng.uniform(-2.0, 2.0, (n, 2))
    normal[np.hypot(normal[:, 0], normal[:, 1]) < 0.1] = (0.7, -0.4)
    avg = euler.roe_average(left, right)
    return euler.eigensystem(avg, normal), avg, normal


def test_left_right_inverse_bulk():
    sys, _, _ = _random_systems(10_000, 4)
    prod = sys.right @ sys.left
    err = np.abs(prod - np.eye(4))
    assert np.max(err) < 1e-12


def test_jacobian_reconstruction_analytic():
    """R diag(lam) L matches the analytic Jacobian at the averaged state."""
    sys, avg, normal = _random_systems(10_000, 5)
    a_eig = sys.right @ (sys.lam[..., None] * sys.left)
    # analytic Jacobian needs a conserved state with the Roe-averaged (u, v, H)
    p_avg = (euler.GAMMA - 1.0) / euler.GAMMA * avg.rho * (
        avg.h - 0.5 * (avg.u**2 + avg.v**2))
    prim = np.stack([avg.rho, avg.u, avg.v, p_avg], axis=-1)
    cons = euler.primitive_to_conserved(prim)
    a_exact = euler.flux_jacobian(cons, normal)
    scale = np.maximum(np.max(np.abs(a_exact), axis=(-2, -1), keepdims=True), 1e-10)
    assert np.max(np.abs(a_eig - a_exact) / scale) < 1e-10


def test_jacobian_matches_finite_differences():
    rng = np.random.default_rng(6)
    n = 10_000
    prim = random_primitives(rng, n)
    cons = euler.primitive_to_conserved(prim)
    normal = rng.uniform(-2.0, 2.0, (n, 2))
    normal[np.hypot(normal[:, 0], normal[:, 1]) < 0.1] = (1.0, 0.3)
    jac = euler.flux_jacobian(cons, normal)
    eps = 1e-7
    fd = np.empty_like(jac)
    for k in range(4):
        dq = np.zeros(4)
        dq[k] = eps
        fp = euler.transformed_flux(cons + dq, normal)
        fm = euler.transformed_flux(cons - dq, normal)
        fd[..., k] = (fp - fm) / (2 * eps)
    scale = np.maximum(np.max(np.abs(jac), axis=(-2, -1), keepdims=True), 1.0)
    assert np.max(np.abs(jac - fd) / scale) < 1e-6


def test_eigenvalue_structure():
    sys, _, _ = _random_systems(2000, 7)
    lam = sys.lam
    assert np.all(np.isfinite(lam))
    assert np.all(lam[:, 0] <= lam[:, 1] + 1e-12)
    assert np.all(lam[:, 2] <= lam[:, 3] + 1e-12)
    assert np.allclose(lam[:, 1], lam[:, 2], atol=1e-13)


def test_degenerate_normal_raises():
    cons = euler.primitive_to_conserved(FREE_STREAM)
    avg = euler.roe_average(cons, cons)
    with pytest.raises(ValueError):
        euler.eigensystem(avg, np.array([0.0, 0.0]))
