"""Pointwise algebra of the truncated stochastic Galerkin Burgers system.

All functions accept a single mode vector of length ``M + 1`` or a batch
whose last axis holds the modes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sgburgers.eigen import galerkin_spectral_radius, symmetric_eigvals
from sgburgers.pc_basis import TripleProductTensor


def _check(u, tensor: TripleProductTensor) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != tensor.size:
        raise ValueError(
            f"mode vector has {u.shape[-1]} entries, tensor expects {tensor.size}"
        )
    return u


def assemble_A(u, tensor: TripleProductTensor) -> np.ndarray:
    """System matrix ``A(u)_{jk} = sum_i <phi_i phi_j phi_k> u_i``."""
    u = _check(u, tensor)
    return np.einsum("ijk,...i->...jk", tensor.entries, u)


def flux(u, tensor: TripleProductTensor) -> np.ndarray:
    """Galerkin flux ``f(u) = A(u) u / 2``, contracted directly from the tensor."""
    u = _check(u, tensor)
    n = tensor.size
    outer = (u[..., :, None] * u[..., None, :]).reshape(u.shape[:-1] + (n * n,))
    return 0.5 * (outer @ tensor.entries.reshape(n * n, n))


def flux_potential(u, tensor: TripleProductTensor):
    """``psi(u) = u^T A(u) u / 6``; its gradient is the flux."""
    u = _check(u, tensor)
    return np.einsum("...k,...k->...", flux(u, tensor), u) / 3.0


def entropy(u):
    u = np.asarray(u, dtype=float)
    return 0.5 * np.einsum("...k,...k->...", u, u)


def entropy_flux(u, tensor: TripleProductTensor):
    """``F(u) = u^T f(u) - psi(u) = 2 psi(u)``."""
    u = _check(u, tensor)
    return np.einsum("...k,...k->...", u, flux(u, tensor)) - flux_potential(u, tensor)


def eigenvalues(u, tensor: TripleProductTensor) -> np.ndarray:
    """Ascending eigenvalues of the symmetric matrix ``A(u)`` (cyclic Jacobi)."""
    return symmetric_eigvals(assemble_A(u, tensor))


def max_abs_eigenvalue(u, tensor: TripleProductTensor):
    """Spectral radius of ``A(u)``; the local wave-speed bound."""
    u = _check(u, tensor)
    return galerkin_spectral_radius(u, tensor.entries)


@dataclass(frozen=True)
class Moments:
    expectation: float
    variance: float


def moments(u) -> Moments:
    """Mean and variance of the PC expansion (orthonormal basis)."""
    u = np.asarray(u, dtype=float)
    return Moments(float(u[0]), float(np.sum(u[1:] ** 2)))


def moment_profiles(u) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`moments` over a batch ``(..., M + 1)``."""
    u = np.asarray(u, dtype=float)
    return u[..., 0], np.sum(u[..., 1:] ** 2, axis=-1)
