import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from sgburgers.pc_basis import OrthogonalFamily
from sgburgers.reference import (
    BumpSetup,
    RiemannKind,
    RiemannSetup,
    bump_initial,
    bump_profile,
    family_coefficient,
    family_moments,
    hermite_second_moment,
    initial_coefficients,
    integral_phi,
    integral_xi_phi,
    jacobi_shock_coefficient,
    laguerre_shock_coefficient,
    nodal_initial_field,
    pointwise_solution,
    quadrature_coefficient,
    rarefaction_coefficient,
    reference_moments,
    shock_coefficient,
)

SETUP = RiemannSetup()
HERMITE = OrthogonalFamily.hermite()
FAMILIES = [
    HERMITE,
    OrthogonalFamily.jacobi(0.0, 0.0),
    OrthogonalFamily.jacobi(1.5, 0.5),
    OrthogonalFamily.laguerre(0.0),
    OrthogonalFamily.laguerre(2.0),
]


def test_frozen_oracle_values():
    # adaptive quadrature values, frozen
    assert rarefaction_coefficient(3, 0.6, 0.25, SETUP) == pytest.approx(
        0.0010855767278821463, rel=1e-11
    )
    assert laguerre_shock_coefficient(1, 0.56, 0.3, SETUP, 0.0) == pytest.approx(
        -0.9357588823428845, rel=1e-12
    )
    assert shock_coefficient(1, 0.5, 0.1, SETUP) == pytest.approx(0.99788456080286547, rel=1e-14)


def test_shock_at_centre_and_far_field():
    assert shock_coefficient(0, 0.5, 0.2, SETUP) == pytest.approx(0.0, abs=1e-15)
    assert shock_coefficient(0, 0.0, 0.2, SETUP) == pytest.approx(1.0)
    assert shock_coefficient(1, 1.0, 0.2, SETUP) == pytest.approx(0.2)
    assert shock_coefficient(4, 1.0, 0.2, SETUP) == pytest.approx(0.0, abs=1e-12)
    # u_1 at xi_s = 0 is b + a sqrt(2/pi)
    assert shock_coefficient(1, 0.5, 1.0, SETUP) == pytest.approx(0.2 + math.sqrt(2 / math.pi))


def test_laguerre_closed_form_at_unit_germ():
    # xi_s = 1: <u, L_1> = -b - 2a e^-1 for alpha = 0
    value = laguerre_shock_coefficient(1, 0.56, 0.3, SETUP, 0.0)
    assert value == pytest.approx(-0.2 - 2 * math.exp(-1), rel=1e-13)


@pytest.mark.parametrize("family", FAMILIES, ids=lambda f: f"{f.kind.value}")
@pytest.mark.parametrize("kind", list(RiemannKind))
def test_generic_coefficients_match_quadrature(family, kind):
    for x, t in [(0.45, 0.2), (0.52, 0.35), (0.61, 0.5)]:
        for i in range(5):
            closed = family_coefficient(family, kind, i, x, t, SETUP)
            oracle = quadrature_coefficient(family, kind, i, x, t, SETUP)
            assert closed == pytest.approx(oracle, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.05, 1.0), st.integers(0, 8))
def test_hermite_closed_forms_match_generic_path(x, t, i):
    for kind, closed in ((RiemannKind.SHOCK, shock_coefficient), (RiemannKind.RAREFACTION, rarefaction_coefficient)):
        generic = family_coefficient(HERMITE, kind, i, x, t, SETUP)
        assert closed(i, x, t, SETUP) == pytest.approx(generic, abs=1e-12)


def test_vectorised_coefficients():
    x = np.linspace(0.3, 0.7, 5)
    values = shock_coefficient(2, x, 0.3, SETUP)
    assert values.shape == (5,)
    assert np.allclose(values, [shock_coefficient(2, xi, 0.3, SETUP) for xi in x])


def test_partial_integrals_against_quadrature():
    for family in FAMILIES:
        lo, hi = family.support
        a = -0.3 if math.isinf(lo) or lo < 0 else 0.4
        b = 0.8 if not math.isinf(lo) and lo < 0 else 1.7
        for i in range(4):
            ref = integrate.quad(lambda z: family.eval(i, z) * family.weight(z), a, b)[0]
            ref_x = integrate.quad(lambda z: z * family.eval(i, z) * family.weight(z), a, b)[0]
            assert integral_phi(family, i, a, b) == pytest.approx(ref, abs=1e-12)
            assert integral_xi_phi(family, i, a, b) == pytest.approx(ref_x, abs=1e-12)


def _second_moment_oracle(kind, x, t):
    f = lambda z: float(pointwise_solution(kind, x, t, z, SETUP)) ** 2 * math.exp(-z * z / 2)
    return integrate.quad(f, -12, 12, limit=400, points=[-8, 8])[0] / math.sqrt(2 * math.pi)


@pytest.mark.parametrize("kind", list(RiemannKind))
def test_exact_second_moment(kind):
    for x in (0.3, 0.47, 0.5, 0.58):
        assert hermite_second_moment(kind, x, 0.3, SETUP) == pytest.approx(
            _second_moment_oracle(kind, x, 0.3), abs=1e-9
        )


def test_exact_variance_properties():
    m = reference_moments(RiemannKind.SHOCK, 0.5, 0.25, SETUP)
    assert m.variance == pytest.approx(1 + 0.04 + 0.4 * math.sqrt(2 / math.pi), rel=1e-13)
    far = reference_moments(RiemannKind.RAREFACTION, -0.5, 0.25, SETUP)
    assert far.variance == pytest.approx(0.04, abs=1e-12)
    centre = reference_moments(RiemannKind.RAREFACTION, 0.5, 0.25, SETUP).variance
    edge = reference_moments(RiemannKind.RAREFACTION, 0.625, 0.25, SETUP).variance
    assert edge > centre
    # the truncated series approaches the exact value from below
    x = 0.55
    exact = reference_moments(RiemannKind.SHOCK, x, 0.25, SETUP).variance
    trunc = [reference_moments(RiemannKind.SHOCK, x, 0.25, SETUP, m).variance for m in (3, 10, 40)]
    assert trunc[0] < trunc[1] < trunc[2] <= exact + 1e-12
    # the tail decays slowly (u_i^2 ~ i^-3/2), hence the exact default
    assert exact - trunc[2] > 0.01


def test_family_moments():
    # uniform germ, far from the shock: E = +-a, Var = b^2/3
    fam = OrthogonalFamily.jacobi(0.0, 0.0)
    for x, mean in ((0.1, 1.0), (0.9, -1.0)):
        c = np.array([jacobi_shock_coefficient(i, x, 0.25, SETUP, 0.0, 0.0) for i in range(4)])
        e, v = family_moments(c, fam)
        assert e == pytest.approx(mean, abs=1e-13)
        assert v == pytest.approx(0.04 / 3, rel=1e-12)
    c = np.array([shock_coefficient(i, 0.52, 0.25, SETUP) for i in range(4)])
    e, v = family_moments(c, HERMITE)
    ref = reference_moments(RiemannKind.SHOCK, 0.52, 0.25, SETUP, 3)
    assert e == pytest.approx(ref.expectation) and v == pytest.approx(ref.variance)


def test_initial_data_conventions():
    c = initial_coefficients("shock", np.array([0.2, 0.5, 0.8]), SETUP, 3)
    assert np.allclose(c[:, 0], [1, 1, -1]) and np.allclose(c[:, 1], 0.2)
    assert np.allclose(c[:, 2:], 0)
    r = initial_coefficients("rarefaction", 0.7, SETUP, 2)
    assert np.allclose(r, [1.0, 0.2, 0.0])
    coords = np.array([[0.25, 0.5], [0.5, 0.75]])
    field = nodal_initial_field("shock", coords, SETUP, 1)
    assert np.allclose(field[:, :, 0], [[1, 1], [-1, -1]])


def test_bump():
    s = BumpSetup()
    assert bump_profile(0.25, s) == pytest.approx(math.exp(-1))
    assert bump_profile(0.5, s) == 0.0 and bump_profile(0.0, s) == 0.0
    u = bump_initial(np.array([0.25, 0.9]), s)
    assert np.allclose(u[0], [1 + s.epsilon / math.e, s.epsilon * 0.2 / math.e, 0, 0])
    assert np.allclose(u[1], [1, 0, 0, 0])
    with pytest.raises(ValueError):
        bump_initial(0.2, s, order=0)


def test_validation():
    with pytest.raises(ValueError):
        RiemannSetup(a=0.0)
    with pytest.raises(ValueError):
        RiemannSetup(b=-1.0)
    with pytest.raises(ValueError):
        BumpSetup(r=0.0)
    with pytest.raises(ValueError):
        shock_coefficient(1, 0.5, 0.0, SETUP)
    with pytest.raises(ValueError):
        rarefaction_coefficient(-1, 0.5, 0.1, SETUP)


def test_documented_reference_values():
    assert shock_coefficient(2, 0.5, 0.3, SETUP) == pytest.approx(0.0, abs=1e-16)
    raref = RiemannSetup(kind="rarefaction")
    far = [rarefaction_coefficient(i, -2.0, 0.25, raref) for i in range(4)]
    assert np.allclose(far, [-1.0, 0.2, 0.0, 0.0], atol=1e-14)
    assert rarefaction_coefficient(0, 0.5, 0.25, raref) == pytest.approx(0.0, abs=1e-15)
    # shock exactly at x0, not on an element boundary: left state
    assert initial_coefficients("shock", 0.5, SETUP, 3)[0] == 1.0
    assert initial_coefficients("shock", 0.5, SETUP, 3, at_element_start=True)[0] == -1.0
    assert bump_initial(0.25, BumpSetup())[0] == pytest.approx(1.01)
    # Legendre germ, xi_s = 0: <u, P_1> = a + 2b/3 with the b xi term included
    assert jacobi_shock_coefficient(1, 0.5, 0.3, SETUP, 0.0, 0.0) == pytest.approx(1.0 + 0.4 / 3)
    # germ beyond the support: u = -a + b xi for every xi, so only b <xi, P_1> = 2b/3 remains
    assert jacobi_shock_coefficient(1, 0.9, 0.3, SETUP, 0.0, 0.0) == pytest.approx(0.4 / 3, abs=1e-14)
    # negative germ for Laguerre: u = a + b xi, and <a + b xi, 1 - xi> = -b
    lag_left = laguerre_shock_coefficient(1, 0.3, 0.3, SETUP, 0.0)
    assert lag_left == pytest.approx(-0.2, abs=1e-14)
