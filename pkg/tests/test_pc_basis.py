import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from sgburgers.pc_basis import (
    OrthogonalFamily,
    build_tensor,
    gauss_hermite,
    gaussian_density,
    hermite_all,
    hermite_eval,
    hermite_triple,
    triple_quadrature_oracle,
    weighted_eval,
)


def test_first_hermite_polynomials():
    x = np.linspace(-3, 3, 13)
    assert np.allclose(hermite_eval(0, x), 1.0)
    assert np.allclose(hermite_eval(1, x), x)
    assert np.allclose(hermite_eval(2, x), (x**2 - 1) / math.sqrt(2))
    assert np.allclose(hermite_eval(3, x), (x**3 - 3 * x) / math.sqrt(6))


def test_hermite_matches_scipy_probabilists():
    x = np.linspace(-4, 4, 41)
    for n in range(12):
        ref = special.eval_hermitenorm(n, x) / math.sqrt(math.factorial(n))
        assert np.allclose(hermite_eval(n, x), ref, atol=1e-10)
    assert np.allclose(hermite_all(11, x)[7], hermite_eval(7, x))


def test_negative_degree_rejected():
    with pytest.raises(ValueError):
        hermite_eval(-1, 0.0)


def test_gauss_hermite_is_normalized_and_exact():
    x, w = gauss_hermite(10)
    assert math.isclose(w.sum(), 1.0, rel_tol=1e-14)
    # E[xi^(2k)] = (2k-1)!!
    assert math.isclose(w @ x**4, 3.0, rel_tol=1e-12)
    assert math.isclose(w @ x**18, special.factorial2(17), rel_tol=1e-10)


@pytest.mark.parametrize(
    "ijk, value",
    [
        ((0, 0, 0), 1.0),
        ((1, 1, 0), 1.0),
        ((1, 1, 2), math.sqrt(2)),
        ((1, 2, 3), math.sqrt(3)),
        ((2, 2, 2), 2 * math.sqrt(2)),
        ((2, 3, 3), 3 * math.sqrt(2)),
        ((1, 1, 1), 0.0),
        ((0, 1, 3), 0.0),
    ],
)
def test_triple_product_known_values(ijk, value):
    assert math.isclose(hermite_triple(*ijk), value, rel_tol=1e-14, abs_tol=1e-15)


def test_oracle_rejects_underresolved_rule():
    with pytest.raises(ValueError):
        triple_quadrature_oracle(3, 3, 3, 4)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 9), st.integers(0, 9), st.integers(0, 9))
def test_triple_product_symmetric_and_matches_quadrature(i, j, k):
    value = hermite_triple(i, j, k)
    assert value == pytest.approx(hermite_triple(j, k, i), rel=1e-14, abs=1e-15)
    assert value == pytest.approx(hermite_triple(k, j, i), rel=1e-14, abs=1e-15)
    oracle = triple_quadrature_oracle(i, j, k, (i + j + k) // 2 + 1)
    assert abs(value - oracle) <= 1e-10


def test_tensor_layout():
    t = build_tensor(3)
    assert t.size == 4
    assert t.entries.shape == (4, 4, 4)
    assert not t.entries.flags.writeable
    assert t(1, 2, 3) == t(3, 1, 2) == pytest.approx(math.sqrt(3))
    for i, j, k, v in t.nonzeros:
        assert i <= j <= k and v == t(i, j, k)
    with pytest.raises(ValueError):
        build_tensor(-1)


def test_family_recurrences_match_scipy():
    x = np.linspace(-0.95, 0.95, 9)
    jac = OrthogonalFamily.jacobi(0.3, -0.4)
    lag = OrthogonalFamily.laguerre(1.5)
    for n in range(8):
        assert np.allclose(jac.eval(n, x), special.eval_jacobi(n, 0.3, -0.4, x), atol=1e-12)
        assert np.allclose(lag.eval(n, 3 * (x + 1)), special.eval_genlaguerre(n, 1.5, 3 * (x + 1)), atol=1e-10)


def test_family_norms_match_quadrature():
    from scipy import integrate

    jac = OrthogonalFamily.jacobi(0.5, 1.25)
    lag = OrthogonalFamily.laguerre(0.7)
    for n in range(5):
        jq, _ = integrate.quad(lambda z: jac.eval(n, z) ** 2, -1, 1, weight="alg", wvar=(1.25, 0.5))
        lq, _ = integrate.quad(lambda z: lag.eval(n, z) ** 2 * lag.weight(z), 0, np.inf)
        assert math.isclose(jac.norm_squared(n), jq, rel_tol=1e-10)
        assert math.isclose(lag.norm_squared(n), lq, rel_tol=1e-8)


def test_family_parameters_validated():
    with pytest.raises(ValueError):
        OrthogonalFamily.jacobi(-1.0, 0.0)
    with pytest.raises(ValueError):
        OrthogonalFamily.jacobi(0.0, -1.5)
    with pytest.raises(ValueError):
        OrthogonalFamily.laguerre(-1.0)


def test_weights_vanish_outside_support():
    assert OrthogonalFamily.jacobi(0, 0).weight(1.5) == 0.0
    assert OrthogonalFamily.laguerre(0).weight(-0.1) == 0.0
    assert OrthogonalFamily.laguerre(0).weight(1.0) == pytest.approx(math.exp(-1))


def test_documented_point_values():
    assert hermite_eval(0, 3.7) == 1.0
    assert hermite_eval(1, 2.0) == 2.0
    assert hermite_eval(2, 1.0) == 0.0
    assert weighted_eval(0, 0.0) == pytest.approx(1 / math.sqrt(2 * math.pi))
    assert weighted_eval(1, 0.0) == 0.0
    assert weighted_eval(2, 1.0) == pytest.approx(0.0, abs=1e-16)
    assert gaussian_density(0.0) == pytest.approx(0.3989422804014327)


def test_first_degree_of_each_family():
    xi = np.linspace(-0.9, 0.9, 7)
    alpha, beta = 0.7, 2.2
    jac = OrthogonalFamily.jacobi(alpha, beta)
    assert np.allclose(jac.eval(1, xi), 0.5 * (alpha - beta) + 0.5 * (alpha + beta + 2) * xi)
    assert np.allclose(OrthogonalFamily.laguerre(1.3).eval(1, xi), 1.3 - xi + 1.0)
    assert np.allclose(OrthogonalFamily.laguerre(0.0).eval(1, xi), 1 - xi)
    for fam in (jac, OrthogonalFamily.laguerre(0.4), OrthogonalFamily.hermite()):
        assert np.allclose(fam.eval(0, xi), 1.0)


def test_small_tensors_and_oracle_examples():
    assert build_tensor(0).entries.tolist() == [[[1.0]]]
    t1 = build_tensor(1)
    nonzero = {tuple(idx) for idx in np.argwhere(np.abs(t1.entries) > 0)}
    assert nonzero == {(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)}
    assert triple_quadrature_oracle(1, 1, 2, 8) == pytest.approx(math.sqrt(2), abs=1e-12)
    assert triple_quadrature_oracle(0, 5, 5, 8) == pytest.approx(1.0, abs=1e-12)
    assert triple_quadrature_oracle(3, 3, 4, 8) == pytest.approx(hermite_triple(3, 3, 4), abs=1e-12)
