import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sgburgers.galerkin import (
    assemble_A,
    eigenvalues,
    entropy,
    entropy_flux,
    flux,
    flux_potential,
    max_abs_eigenvalue,
    moment_profiles,
    moments,
)
from sgburgers.pc_basis import build_tensor

R2, R3 = math.sqrt(2), math.sqrt(3)


def paper_matrix_m2(u):
    u0, u1, u2 = u
    return np.array(
        [
            [u0, u1, u2],
            [u1, u0 + R2 * u2, R2 * u1],
            [u2, R2 * u1, u0 + 2 * R2 * u2],
        ]
    )


def test_m2_matrix_and_potential():
    t = build_tensor(2)
    u = np.array([0.3, -1.2, 0.7])
    assert np.allclose(assemble_A(u, t), paper_matrix_m2(u), atol=1e-14)
    u0, u1, u2 = u
    psi = u0**3 / 6 + u0 * u1**2 / 2 + u0 * u2**2 / 2 + R2 / 2 * u1**2 * u2 + R2 * 2 / 3 * u2**3 / 2
    assert flux_potential(u, t) == pytest.approx(psi, abs=1e-14)


def test_zero_order_is_burgers():
    t = build_tensor(0)
    u = np.array([[1.5], [-2.0]])
    assert np.allclose(flux(u, t)[:, 0], 0.5 * u[:, 0] ** 2)
    assert np.allclose(flux_potential(u, t), u[:, 0] ** 3 / 6)


def test_order_mismatch_rejected():
    with pytest.raises(ValueError):
        flux(np.zeros(3), build_tensor(3))


@settings(max_examples=50, deadline=None)
@given(arrays(float, 6, elements=st.floats(-3, 3)))
def test_potential_gradient_is_flux(u):
    t = build_tensor(5)
    h = 1e-6
    grad = np.array(
        [(flux_potential(u + h * e, t) - flux_potential(u - h * e, t)) / (2 * h) for e in np.eye(6)]
    )
    assert np.allclose(grad, flux(u, t), atol=1e-6)


@settings(max_examples=50, deadline=None)
@given(arrays(float, 5, elements=st.floats(-3, 3)))
def test_flux_is_half_A_u_and_A_symmetric(u):
    t = build_tensor(4)
    A = assemble_A(u, t)
    assert np.allclose(A, A.T)
    assert np.allclose(flux(u, t), 0.5 * A @ u, atol=1e-12)
    assert entropy_flux(u, t) == pytest.approx(2 * flux_potential(u, t), abs=1e-10)


def _charpoly_roots(A):
    """Eigenvalues from the Faddeev-LeVerrier characteristic polynomial."""
    n = A.shape[0]
    coeffs = [1.0]
    Mk = np.zeros_like(A)
    for k in range(1, n + 1):
        Mk = A @ Mk + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(A @ Mk) / k)
    return np.sort(np.roots(coeffs).real)


def test_eigenvalues_against_characteristic_polynomial(rng):
    t = build_tensor(3)
    for _ in range(20):
        u = rng.normal(size=4)
        lam = eigenvalues(u, t)
        assert np.all(np.diff(lam) >= 0)
        assert np.allclose(lam, _charpoly_roots(assemble_A(u, t)), atol=1e-7)
        assert max_abs_eigenvalue(u, t) == pytest.approx(np.abs(lam).max(), abs=1e-13)


def test_eigenvalues_batch_and_degenerate_state(rng):
    t = build_tensor(3)
    u = rng.normal(size=(7, 5, 4))
    lam = eigenvalues(u, t)
    assert lam.shape == (7, 5, 4)
    assert np.allclose(lam, np.linalg.eigvalsh(assemble_A(u, t)), atol=1e-12)
    # the zero state has a fourfold zero eigenvalue
    assert np.allclose(eigenvalues(np.zeros(4), t), 0.0)
    assert max_abs_eigenvalue(np.array([2.0, 0, 0, 0]), t) == pytest.approx(2.0)


def test_moments():
    m = moments(np.array([0.5, 0.2, -0.1, 0.3]))
    assert m.expectation == 0.5
    assert m.variance == pytest.approx(0.04 + 0.01 + 0.09)
    mean, var = moment_profiles(np.array([[1.0, 0.2, 0.0], [0.0, 0.0, 0.5]]))
    assert np.allclose(mean, [1.0, 0.0]) and np.allclose(var, [0.04, 0.25])
    assert entropy(np.array([1.0, 2.0])) == 2.5


def test_documented_small_order_values():
    t0, t1 = build_tensor(0), build_tensor(1)
    assert flux(np.array([3.0]), t0)[0] == 4.5
    assert flux_potential(np.array([2.0]), t0) == pytest.approx(8 / 6)
    assert entropy(np.array([1.0])) == 0.5
    assert entropy_flux(np.array([1.0]), t0) == pytest.approx(1 / 3)
    assert np.allclose(assemble_A(np.array([0.4, -1.3]), t1), [[0.4, -1.3], [-1.3, 0.4]])
    assert np.allclose(eigenvalues(np.array([0.4, -1.3]), t1), [0.4 - 1.3, 0.4 + 1.3])
    assert np.all(assemble_A(np.zeros(4), build_tensor(3)) == 0)
    assert np.all(flux(np.zeros(4), build_tensor(3)) == 0)
    m = moments(np.array([0.0, 1.0, 1.0, 1.0]))
    assert (m.expectation, m.variance) == (0.0, 3.0)
    m = moments(np.array([5.0, 0, 0, 0]))
    assert (m.expectation, m.variance) == (5.0, 0.0)


@settings(max_examples=30, deadline=None)
@given(arrays(float, 4, elements=st.floats(-2, 2)))
def test_entropy_flux_chain_rule(u):
    """``dF/du = u^T df/du``, both sides by central differences."""
    t = build_tensor(3)
    h = 1e-6
    for e in np.eye(4):
        dF = (entropy_flux(u + h * e, t) - entropy_flux(u - h * e, t)) / (2 * h)
        df = (flux(u + h * e, t) - flux(u - h * e, t)) / (2 * h)
        assert dF == pytest.approx(u @ df, abs=1e-6)
