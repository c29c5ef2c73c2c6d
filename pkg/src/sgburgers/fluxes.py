"""Two-point interface fluxes for the Galerkin Burgers system.

Every flux takes ``(left, right, tensor)`` where *left* is the state
``u(-)`` and *right* the state ``u(+)`` at an interface; batches of interfaces
are handled along leading axes. The jump is ``[u] = right - left``.
"""

from __future__ import annotations

import math
from functools import partial
from typing import Callable

import numpy as np

from sgburgers.galerkin import flux, flux_potential, max_abs_eigenvalue
from sgburgers.pc_basis import TripleProductTensor

FluxFunction = Callable[[np.ndarray, np.ndarray, TripleProductTensor], np.ndarray]

_GAUSS2 = (0.5 - 0.5 / math.sqrt(3.0), 0.5 + 0.5 / math.sqrt(3.0))


def _pair(left, right, tensor):
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    if left.shape != right.shape:
        raise ValueError(f"interface states differ in shape: {left.shape} vs {right.shape}")
    if left.shape[-1] != tensor.size:
        raise ValueError(
            f"mode vector has {left.shape[-1]} entries, tensor expects {tensor.size}"
        )
    return left, right


def ec_flux(left, right, tensor: TripleProductTensor) -> np.ndarray:
    """Entropy-conservative flux.

    ``f_k = 1/2 sum_ij <phi_i phi_j phi_k> (mean(u_i u_j)/3 + 2 mean(u_i) mean(u_j)/3)``,
    evaluated as ``(f(u-) + f(u+)) / 6 + 2 f(mean u) / 3``.
    """
    left, right = _pair(left, right, tensor)
    mean = 0.5 * (left + right)
    return (flux(left, tensor) + flux(right, tensor)) / 6.0 + (2.0 / 3.0) * flux(mean, tensor)


def tadmor_phase_integral(left, right, tensor: TripleProductTensor) -> np.ndarray:
    """``int_0^1 f((1 - s) u(-) + s u(+)) ds`` by two-point Gauss quadrature.

    The integrand is quadratic in ``s`` so the rule is exact.
    """
    left, right = _pair(left, right, tensor)
    total = 0.0
    for s in _GAUSS2:
        total = total + 0.5 * flux((1.0 - s) * left + s * right, tensor)
    return total


def spectral_radius(left, right, tensor: TripleProductTensor) -> np.ndarray:
    """``max(|lambda(-)|, |lambda(+)|)`` from one batched eigensolve."""
    both = max_abs_eigenvalue(np.stack([left, right]), tensor)
    return np.maximum(both[0], both[1])


def llf_es_flux(left, right, tensor: TripleProductTensor, omega: float = 1.0) -> np.ndarray:
    """Entropy-conservative flux plus local Lax-Friedrichs dissipation.

    ``f = f_ec - omega/2 * lambda [u]`` with ``lambda`` the larger spectral
    radius of ``A(u(-))`` and ``A(u(+))``; ``omega`` scales the dissipation.
    """
    if not 0.0 < omega <= 1.0:
        raise ValueError(f"dissipation weight must lie in (0, 1], got {omega}")
    left, right = _pair(left, right, tensor)
    lam = spectral_radius(left, right, tensor)
    return ec_flux(left, right, tensor) - 0.5 * omega * lam[..., None] * (right - left)


def scaled_llf(omega: float) -> FluxFunction:
    return partial(llf_es_flux, omega=omega)


def entropy_residual(left, right, fnum, tensor: TripleProductTensor):
    """``[u] . f_num - [psi]``: zero for EC fluxes, nonpositive for ES fluxes."""
    left, right = _pair(left, right, tensor)
    jump = right - left
    return np.einsum("...k,...k->...", jump, fnum) - (
        flux_potential(right, tensor) - flux_potential(left, tensor)
    )


# Hand-built fluxes for M <= 3


def _scalar_ec(l, r):
    return (l * l + r * r) / 12.0 + ((l + r) / 2.0) ** 2 / 3.0


def _scalar_llf(l, r):
    return 0.25 * (l * l + r * r) - 0.5 * np.maximum(np.abs(l), np.abs(r)) * (r - l)


SCALAR_FLUXES = {"ec": _scalar_ec, "llf": _scalar_llf}


def example_flux(order: int, left, right, scalar_flux: str = "ec") -> np.ndarray:
    """Component-by-component fluxes for PC orders 0 to 3.

    Mixed products are replaced by products of means, squares by means of
    squares, and for ``M = 3`` products of three distinct indices by the split
    ``mean(u_j u_k)/3 + 2 mean(u_j) mean(u_k)/3``. ``f_00`` and ``f_22`` are
    scalar Burgers fluxes selected by *scalar_flux* (``"ec"`` or ``"llf"``).
    """
    if order not in (0, 1, 2, 3):
        raise ValueError(f"hand-built fluxes exist for M <= 3, got {order}")
    try:
        scalar = SCALAR_FLUXES[scalar_flux]
    except KeyError:
        raise ValueError(f"unknown scalar flux {scalar_flux!r}") from None
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    if left.shape[-1] != order + 1 or right.shape != left.shape:
        raise ValueError("interface states do not match the PC order")

    def m(i):
        return 0.5 * (left[..., i] + right[..., i])

    def msq(i, j=None):
        j = i if j is None else j
        return 0.5 * (left[..., i] * left[..., j] + right[..., i] * right[..., j])

    def split(i, j):
        return msq(i, j) / 3.0 + 2.0 * m(i) * m(j) / 3.0

    r2, r3 = math.sqrt(2.0), math.sqrt(3.0)
    f00 = scalar(left[..., 0], right[..., 0])
    if order == 0:
        comps = [f00]
    elif order == 1:
        comps = [f00 + 0.5 * msq(1), m(0) * m(1)]
    else:
        f22 = scalar(left[..., 2], right[..., 2])
        if order == 2:
            comps = [
                f00 + 0.5 * msq(1) + 0.5 * msq(2),
                m(0) * m(1) + r2 * m(1) * m(2),
                2 * r2 * f22 + m(0) * m(2) + 0.5 * r2 * msq(1),
            ]
        else:
            comps = [
                f00 + 0.5 * (msq(1) + msq(2) + msq(3)),
                m(0) * m(1) + r2 * m(1) * m(2) + r3 * split(2, 3),
                m(0) * m(2) + 0.5 * r2 * msq(1) + r3 * split(1, 3) + 2 * r2 * f22
                + 1.5 * r2 * msq(3),
                m(0) * m(3) + r3 * split(1, 2) + 3 * r2 * m(2) * m(3),
            ]
    return np.stack(comps, axis=-1)
