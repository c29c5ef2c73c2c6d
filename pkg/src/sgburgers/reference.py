"""Closed-form PC coefficients of the untruncated stochastic Riemann solutions.

For ``u_L``, ``u_R`` depending linearly on the germ ``xi`` (``p(xi) = b xi``),
the exact solution for fixed ``xi`` is a shock or a rarefaction fan. Its
projection ``u_i(x, t) = int u(x, t, xi) phi_i(xi) omega(xi) dxi`` reduces to
partial integrals of ``phi_i omega`` and ``xi phi_i omega``, which follow from
Rodrigues' formula

    phi_i omega = (e_{i-1} / e_i) d/dxi (phi_{i-1}^{(omega Q)} omega Q),

so that for ``i >= 1``

    int_lo^hi phi_i omega = (e_{i-1}/e_i) [phi_{i-1}^{(omega Q)} omega Q]_lo^hi

and for ``i >= 2``

    int_lo^hi xi phi_i omega
        = (1/e_i) [e_{i-1} xi phi_{i-1}^{(omega Q)} omega Q
                   - e_{i-2} phi_{i-2}^{(omega Q^2)} omega Q^2]_lo^hi.

Limits are clamped to the support of ``omega``, where the boundary terms
vanish. The low modes use partial moments of the weight (normal CDF,
regularized incomplete beta and gamma functions).

Hermite coefficients are with respect to the orthonormal basis and the
Gaussian probability density. Jacobi and Laguerre coefficients are the inner
products ``<u, P_i>`` with the classical polynomials and unnormalized weights.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from sgburgers.pc_basis import (
    SQRT_2PI,
    FamilyKind,
    OrthogonalFamily,
    gaussian_density,
    hermite_eval,
)


class RiemannKind(enum.Enum):
    SHOCK = "shock"
    RAREFACTION = "rarefaction"


@dataclass(frozen=True)
class RiemannSetup:
    """Riemann data ``u_L, u_R = +-a + b xi`` (shock) or ``-+a + b xi`` (rarefaction)."""

    a: float = 1.0
    b: float = 0.2
    x0: float = 0.5
    kind: RiemannKind = RiemannKind.SHOCK

    def __post_init__(self):
        object.__setattr__(self, "kind", RiemannKind(self.kind))
        if not self.a > 0:
            raise ValueError(f"jump half-height a must be positive, got {self.a}")
        if not self.b > 0:
            raise ValueError(f"stochastic slope b must be positive, got {self.b}")

    @property
    def left_mean(self) -> float:
        return self.a if self.kind is RiemannKind.SHOCK else -self.a

    def states(self, order: int) -> tuple[np.ndarray, np.ndarray]:
        """Left and right mode vectors of the Hermite expansion."""
        left = np.zeros(order + 1)
        right = np.zeros(order + 1)
        left[0], right[0] = self.left_mean, -self.left_mean
        if order >= 1:
            left[1] = right[1] = self.b
        return left, right


@dataclass(frozen=True)
class BumpSetup:
    x0: float = 0.25
    r: float = 0.25
    epsilon: float = math.e / 100.0
    b: float = 0.2

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"bump radius must be positive, got {self.r}")


def _check_time(t):
    if np.any(np.asarray(t) < 0):
        raise ValueError("time must be nonnegative")


def _check_positive_time(t):
    if np.any(np.asarray(t) <= 0):
        raise ValueError("closed-form coefficients need t > 0; use initial_coefficients at t = 0")


def _scalar(value):
    value = np.asarray(value, dtype=float)
    return float(value) if value.ndim == 0 else value


# Partial integrals over the weight


def partial_mass(family: OrthogonalFamily, lo, hi):
    """``int_lo^hi omega`` with limits clamped to the support."""
    lo = family.clamp(np.asarray(lo, dtype=float))
    hi = family.clamp(np.asarray(hi, dtype=float))
    a, b = family.alpha, family.beta
    if family.kind is FamilyKind.HERMITE:
        return _scalar(special.ndtr(hi) - special.ndtr(lo))
    if family.kind is FamilyKind.JACOBI:
        scale = 2.0 ** (a + b + 1) * special.beta(b + 1, a + 1)
        cdf = lambda z: special.betainc(b + 1, a + 1, 0.5 * (z + 1.0))  # noqa: E731
        return _scalar(scale * (cdf(hi) - cdf(lo)))
    scale = special.gamma(a + 1)
    return _scalar(scale * (special.gammainc(a + 1, hi) - special.gammainc(a + 1, lo)))


def partial_first_moment(family: OrthogonalFamily, lo, hi):
    """``int_lo^hi xi omega`` with limits clamped to the support."""
    if family.kind is FamilyKind.HERMITE:
        return _scalar(_boundary(family, lambda z: -gaussian_density(z), lo, hi))
    if family.kind is FamilyKind.JACOBI:
        # xi = (1 + xi) - 1
        up = OrthogonalFamily.jacobi(family.alpha, family.beta + 1)
        return _scalar(partial_mass(up, lo, hi) - partial_mass(family, lo, hi))
    return partial_mass(OrthogonalFamily.laguerre(family.alpha + 1), lo, hi)


def _boundary(family: OrthogonalFamily, g, lo, hi):
    """``g(hi) - g(lo)`` after clamping, with ``g = 0`` at infinite support ends."""

    def at(z):
        z = family.clamp(np.asarray(z, dtype=float))
        finite = np.isfinite(z)
        return np.where(finite, g(np.where(finite, z, 0.0)), 0.0)

    return at(hi) - at(lo)


def _shifted_weight(family: OrthogonalFamily, times: int):
    """``omega Q^times`` as a function (the weight of ``family.shifted(times)``)."""
    shifted = family.shifted(times)
    if family.kind is FamilyKind.HERMITE:
        return gaussian_density
    return shifted.weight


def integral_phi(family: OrthogonalFamily, i: int, lo, hi):
    """``int_lo^hi phi_i omega``."""
    if i < 0:
        raise ValueError("mode index must be nonnegative")
    if i == 0:
        return partial_mass(family, lo, hi)
    ratio = family.rodrigues_constant(i - 1) / family.rodrigues_constant(i)
    up = family.shifted(1)
    w1 = _shifted_weight(family, 1)
    return _scalar(ratio * _boundary(family, lambda z: up.eval(i - 1, z) * w1(z), lo, hi))


def integral_xi_phi(family: OrthogonalFamily, i: int, lo, hi):
    """``int_lo^hi xi phi_i omega``."""
    if i < 0:
        raise ValueError("mode index must be nonnegative")
    if i == 0:
        return partial_first_moment(family, lo, hi)
    e = family.rodrigues_constant
    up = family.shifted(1)
    w1 = _shifted_weight(family, 1)
    if i == 1:
        # [xi omega Q] - int omega Q, scaled by e_0 / e_1
        edge = _boundary(family, lambda z: z * w1(z), lo, hi)
        inner = partial_mass(up, lo, hi) if family.kind is not FamilyKind.HERMITE else (
            partial_mass(family, lo, hi)
        )
        return _scalar(e(0) / e(1) * (edge - inner))
    up2 = family.shifted(2)
    w2 = _shifted_weight(family, 2)

    def g(z):
        return (e(i - 1) * z * up.eval(i - 1, z) * w1(z) - e(i - 2) * up2.eval(i - 2, z) * w2(z)) / e(i)

    return _scalar(_boundary(family, g, lo, hi))


def _support_integrals(family: OrthogonalFamily, i: int) -> tuple[float, float]:
    lo, hi = family.support
    return float(integral_phi(family, i, lo, hi)), float(integral_xi_phi(family, i, lo, hi))


# Riemann problems in any family


def shock_germ(x, t, setup: RiemannSetup):
    """``xi_s = (x - x0) / (b t)``: germ value at which the shock passes *x*."""
    return (np.asarray(x, dtype=float) - setup.x0) / (setup.b * t)


def fan_germs(x, t, setup: RiemannSetup):
    """``xi_1 = (x - x0 - a t)/(b t)`` and ``xi_2 = (x - x0 + a t)/(b t)``."""
    x = np.asarray(x, dtype=float)
    bt = setup.b * t
    return (x - setup.x0 - setup.a * t) / bt, (x - setup.x0 + setup.a * t) / bt


def family_shock_coefficient(family: OrthogonalFamily, i: int, x, t, setup: RiemannSetup):
    """``<u, phi_i> = a <1, phi_i> + b <xi, phi_i> - 2a int_lo^{xi_s} phi_i omega``."""
    _check_positive_time(t)
    one, first = _support_integrals(family, i)
    lo = family.support[0]
    xi_s = shock_germ(x, t, setup)
    return _scalar(setup.a * one + setup.b * first - 2.0 * setup.a * integral_phi(family, i, lo, xi_s))


def family_rarefaction_coefficient(family: OrthogonalFamily, i: int, x, t, setup: RiemannSetup):
    """Projection of the fan ``u = a + b xi`` (``xi < xi_1``), ``a + b xi_1`` (fan), ``-a + b xi`` (``xi > xi_2``)."""
    _check_positive_time(t)
    one, first = _support_integrals(family, i)
    hi = family.support[1]
    xi1, xi2 = fan_germs(x, t, setup)
    a, b = setup.a, setup.b
    value = (
        a * one
        + b * first
        + b * xi1 * integral_phi(family, i, xi1, xi2)
        - b * integral_xi_phi(family, i, xi1, xi2)
        - 2.0 * a * integral_phi(family, i, xi2, hi)
    )
    return _scalar(value)


def family_coefficient(family: OrthogonalFamily, kind, i: int, x, t, setup: RiemannSetup):
    kind = RiemannKind(kind)
    if kind is RiemannKind.SHOCK:
        return family_shock_coefficient(family, i, x, t, setup)
    return family_rarefaction_coefficient(family, i, x, t, setup)


# Normalized Hermite closed forms


def shock_coefficient(i: int, x, t, setup: RiemannSetup):
    """Hermite coefficient of the shock solution.

    ``u_0 = a - 2a Phi(xi_s)`` and, for ``i >= 1``,
    ``u_i = b delta_{i1} + a sqrt(2/(pi i)) phi_{i-1}(xi_s) exp(-xi_s^2/2)``.
    """
    _check_positive_time(t)
    if i < 0:
        raise ValueError("mode index must be nonnegative")
    xi_s = shock_germ(x, t, setup)
    if i == 0:
        return _scalar(setup.a - 2.0 * setup.a * special.ndtr(xi_s))
    value = setup.a * math.sqrt(2.0 / (math.pi * i)) * hermite_eval(i - 1, xi_s) * np.exp(-0.5 * xi_s**2)
    return _scalar(value + (setup.b if i == 1 else 0.0))


def rarefaction_coefficient(i: int, x, t, setup: RiemannSetup):
    """Hermite coefficient of the rarefaction solution.

    For ``i >= 2``, with ``g_n(z) = phi_n(z) exp(-z^2/2)``,
    ``u_i = b / sqrt(2 pi i (i-1)) (g_{i-2}(xi_2) - g_{i-2}(xi_1))``;
    ``u_0`` and ``u_1`` follow from partial Gaussian moments.
    """
    _check_positive_time(t)
    if i < 0:
        raise ValueError("mode index must be nonnegative")
    if i < 2:
        return family_rarefaction_coefficient(OrthogonalFamily.hermite(), i, x, t, setup)
    xi1, xi2 = fan_germs(x, t, setup)

    def g(z):
        return hermite_eval(i - 2, z) * np.exp(-0.5 * z**2)

    return _scalar(setup.b / math.sqrt(2.0 * math.pi * i * (i - 1)) * (g(xi2) - g(xi1)))


def jacobi_shock_coefficient(i, x, t, setup, alpha, beta):
    return family_shock_coefficient(OrthogonalFamily.jacobi(alpha, beta), i, x, t, setup)


def jacobi_rarefaction_coefficient(i, x, t, setup, alpha, beta):
    return family_rarefaction_coefficient(OrthogonalFamily.jacobi(alpha, beta), i, x, t, setup)


def laguerre_shock_coefficient(i, x, t, setup, alpha):
    return family_shock_coefficient(OrthogonalFamily.laguerre(alpha), i, x, t, setup)


def laguerre_rarefaction_coefficient(i, x, t, setup, alpha):
    return family_rarefaction_coefficient(OrthogonalFamily.laguerre(alpha), i, x, t, setup)


# Exact solution for fixed germ (used by the quadrature oracle)


def pointwise_solution(kind, x: float, t: float, xi, setup: RiemannSetup):
    """``u(x, t, xi)`` of the deterministic Riemann problem for each germ value."""
    kind = RiemannKind(kind)
    xi = np.asarray(xi, dtype=float)
    a, b = setup.a, setup.b
    if kind is RiemannKind.SHOCK:
        return np.where(x < setup.x0 + t * b * xi, a + b * xi, -a + b * xi)
    u_l, u_r = -a + b * xi, a + b * xi
    fan = (x - setup.x0) / t if t > 0 else 0.0
    return np.where(
        x < setup.x0 + t * u_l, u_l, np.where(x > setup.x0 + t * u_r, u_r, fan)
    )


# Initial data


def initial_coefficients(kind, x, setup: RiemannSetup, order: int, at_element_start=False) -> np.ndarray:
    """Mode vectors of the Riemann data at ``t = 0``, shape ``x.shape + (order + 1,)``.

    A point exactly at ``x0`` takes the left state, unless it is the first
    node of an element starting at ``x0`` (*at_element_start*), which takes the
    right state.
    """
    setup = RiemannSetup(setup.a, setup.b, setup.x0, RiemannKind(kind))
    x = np.asarray(x, dtype=float)
    left, right = setup.states(order)
    start = np.broadcast_to(np.asarray(at_element_start, dtype=bool), x.shape)
    use_right = (x > setup.x0) | ((x == setup.x0) & start)
    return np.where(use_right[..., None], right, left)


def nodal_initial_field(kind, coords: np.ndarray, setup: RiemannSetup, order: int) -> np.ndarray:
    """Riemann data on element nodes ``coords`` of shape ``(N, n_nodes)``."""
    coords = np.asarray(coords, dtype=float)
    start = np.zeros(coords.shape, dtype=bool)
    if coords.shape[1] > 1:
        start[:, 0] = True
    return initial_coefficients(kind, coords, setup, order, start)


def bump_profile(x, setup: BumpSetup):
    """``exp(-r^2 / (r^2 - (x - x0)^2))`` inside the bump, 0 outside."""
    d2 = (np.asarray(x, dtype=float) - setup.x0) ** 2
    r2 = setup.r**2
    inside = d2 < r2
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        value = np.exp(-r2 / np.where(inside, r2 - d2, 1.0))
    return np.where(inside, value, 0.0)


def bump_initial(x, setup: BumpSetup, order: int = 3) -> np.ndarray:
    """``u_0 = 1 + eps g(x)``, ``u_1 = eps b g(x)``, higher modes zero."""
    if order < 1:
        raise ValueError("the bump needs at least PC order 1")
    g = bump_profile(x, setup)
    out = np.zeros(np.shape(g) + (order + 1,))
    out[..., 0] = 1.0 + setup.epsilon * g
    out[..., 1] = setup.epsilon * setup.b * g
    return out


# Moments


@dataclass(frozen=True)
class ReferenceMoments:
    expectation: np.ndarray
    variance: np.ndarray
    truncation: int | None


def hermite_second_moment(kind, x, t, setup: RiemannSetup):
    """``E[u^2]`` of the exact solution from partial Gaussian moments."""
    kind = RiemannKind(kind)
    _check_positive_time(t)
    a, b = setup.a, setup.b
    h = OrthogonalFamily.hermite()
    if kind is RiemannKind.SHOCK:
        # u^2 = a^2 + b^2 xi^2 + 2ab xi sign(xi - xi_s)
        xi_s = shock_germ(x, t, setup)
        return _scalar(a * a + b * b + 4.0 * a * b * gaussian_density(xi_s))
    xi1, xi2 = fan_germs(x, t, setup)
    inf = math.inf

    def m2(lo, hi):
        # int xi^2 omega = Phi - [xi omega]
        return partial_mass(h, lo, hi) - _boundary(h, lambda z: z * gaussian_density(z), lo, hi)

    def square_moment(c, lo, hi):
        # int (c + b xi)^2 omega
        return c * c * partial_mass(h, lo, hi) + 2 * c * b * partial_first_moment(h, lo, hi) + b * b * m2(lo, hi)

    fan_value = a + b * xi1
    value = (
        square_moment(a, -inf, xi1)
        + fan_value**2 * partial_mass(h, xi1, xi2)
        + square_moment(-a, xi2, inf)
    )
    return _scalar(value)


def reference_moments(kind, x, t, setup: RiemannSetup, m_report: int | None = None) -> ReferenceMoments:
    """Expectation and variance of the untruncated Hermite solution.

    With ``m_report = None`` the variance is exact, ``E[u^2] - u_0^2``, which
    equals the full series ``sum_{i >= 1} u_i^2``. Otherwise the series is cut
    after mode *m_report*.
    """
    kind = RiemannKind(kind)
    coefficient = shock_coefficient if kind is RiemannKind.SHOCK else rarefaction_coefficient
    mean = np.asarray(coefficient(0, x, t, setup), dtype=float)
    if m_report is None:
        var = np.asarray(hermite_second_moment(kind, x, t, setup)) - mean**2
        var = np.maximum(var, 0.0)
    else:
        var = sum(np.asarray(coefficient(i, x, t, setup)) ** 2 for i in range(1, m_report + 1))
    return ReferenceMoments(_scalar(mean), _scalar(var), m_report)


def family_moments(coefficients: np.ndarray, family: OrthogonalFamily) -> tuple[np.ndarray, np.ndarray]:
    """Mean and truncated variance from inner products ``<u, phi_i>``, ``i = 0..M``.

    With ``h_i = <phi_i, phi_i>``: ``E = c_0 / h_0`` and
    ``Var = sum_{i >= 1} c_i^2 / (h_i h_0)``.
    """
    c = np.asarray(coefficients, dtype=float)
    norms = np.array([family.norm_squared(i) for i in range(c.shape[-1])])
    mean = c[..., 0] / norms[0]
    var = np.sum(c[..., 1:] ** 2 / norms[1:], axis=-1) / norms[0]
    return mean, var


def quadrature_coefficient(family: OrthogonalFamily, kind, i: int, x: float, t: float, setup: RiemannSetup) -> float:
    """Independent oracle: adaptive quadrature of ``int u(x,t,xi) phi_i(xi) omega(xi) dxi``.

    Breakpoints at the kinks of ``u`` in ``xi`` keep the integrand smooth on
    every subinterval; the Hermite range is cut at ten standard deviations
    beyond them.
    """
    kind = RiemannKind(kind)
    lo, hi = family.support
    if kind is RiemannKind.SHOCK:
        kinks = [float(shock_germ(x, t, setup))]
    else:
        kinks = [float(z) for z in fan_germs(x, t, setup)]
    if family.kind is FamilyKind.HERMITE:
        lo, hi = min(kinks + [0.0]) - 10.0, max(kinks + [0.0]) + 10.0
        poly = lambda z: special.eval_hermitenorm(i, z) / math.sqrt(math.factorial(i))  # noqa: E731
        weight = lambda z: math.exp(-0.5 * z * z) / SQRT_2PI  # noqa: E731
    elif family.kind is FamilyKind.JACOBI:
        al, be = family.alpha, family.beta
        poly = lambda z: special.eval_jacobi(i, al, be, z)  # noqa: E731
        weight = lambda z: (1 - z) ** al * (1 + z) ** be  # noqa: E731
    else:
        al = family.alpha
        kinks = kinks + [1.0]
        poly = lambda z: special.eval_genlaguerre(i, al, z)  # noqa: E731
        weight = lambda z: z**al * math.exp(-z)  # noqa: E731
    points = sorted({lo, hi, *(k for k in kinks if lo < k < hi)})

    def integrand(z):
        return float(pointwise_solution(kind, x, t, z, setup)) * poly(z)

    total = 0.0
    for p, q in zip(points[:-1], points[1:]):
        opts = dict(epsabs=1e-12, epsrel=1e-11, limit=400)
        if family.kind is FamilyKind.JACOBI:
            # endpoint singularities of (1 - z)^alpha (1 + z)^beta go to QAWS
            left = be if p == -1.0 else 0.0
            right = al if q == 1.0 else 0.0
            rest = lambda z: (1 - z) ** (al - right) * (1 + z) ** (be - left)  # noqa: E731
            value, _ = integrate.quad(
                lambda z: integrand(z) * rest(z), p, q, weight="alg", wvar=(left, right), **opts
            )
        elif family.kind is FamilyKind.LAGUERRE and p == 0.0:
            value, _ = integrate.quad(
                lambda z: integrand(z) * math.exp(-z), p, q, weight="alg", wvar=(al, 0.0), **opts
            )
        else:
            value, _ = integrate.quad(lambda z: integrand(z) * weight(z), p, q, **opts)
        total += value
    return total
