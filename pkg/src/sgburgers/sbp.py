"""Diagonal-norm summation-by-parts operators on the reference element [-1, 1].

An :class:`SBPOperatorSet` bundles a derivative matrix ``D``, a positive
diagonal norm ``M`` (stored as its diagonal ``weights``), the boundary
restriction ``R`` and ``B = diag(-1, 1)`` such that

    M D + D^T M = R^T B R.

Besides the Gauss-Lobatto-Legendre nodal operators used by the CPR solver,
this module provides the one-node finite-volume operator and the global
finite-difference operators of interior order 2 and 4.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BOUNDARY_MATRIX = np.diag([-1.0, 1.0])


@dataclass(frozen=True)
class SBPOperatorSet:
    kind: str
    degree: int
    nodes: np.ndarray
    D: np.ndarray
    weights: np.ndarray
    R: np.ndarray
    B: np.ndarray = field(default_factory=lambda: BOUNDARY_MATRIX.copy())

    @property
    def M(self) -> np.ndarray:
        return np.diag(self.weights)

    @property
    def n_nodes(self) -> int:
        return self.nodes.size

    @property
    def lifting(self) -> np.ndarray:
        """``M^{-1} R^T B``, shape ``(n_nodes, 2)``."""
        return (self.R.T @ self.B) / self.weights[:, None]

    def sbp_residual(self) -> float:
        lhs = self.M @ self.D + self.D.T @ self.M
        return float(np.max(np.abs(lhs - self.R.T @ self.B @ self.R)))


def legendre_table(order: int, x) -> tuple[np.ndarray, np.ndarray]:
    """Legendre polynomials ``P_0..P_order`` and their derivatives at *x*."""
    x = np.asarray(x, dtype=float)
    P = np.zeros((order + 1,) + x.shape)
    dP = np.zeros_like(P)
    P[0] = 1.0
    if order >= 1:
        P[1] = x
        dP[1] = 1.0
    for n in range(1, order):
        P[n + 1] = ((2 * n + 1) * x * P[n] - n * P[n - 1]) / (n + 1)
        dP[n + 1] = dP[n - 1] + (2 * n + 1) * P[n]
    return P, dP


def gauss_lobatto_legendre(p: int, tol: float = 1e-15, maxiter: int = 100):
    """Nodes (ascending) and weights of the (p+1)-point GLL rule.

    Interior nodes are roots of ``P_p'``; found by Newton iteration from
    Chebyshev-Gauss-Lobatto guesses using ``(1 - x^2) P_p'' = 2x P_p' - p(p+1) P_p``.
    """
    if p < 1:
        raise ValueError("GLL rule needs p >= 1")
    x = -np.cos(np.pi * np.arange(p + 1) / p)
    interior = x[1:-1].copy()
    for _ in range(maxiter):
        P, dP = legendre_table(p, interior)
        d2P = (2 * interior * dP[p] - p * (p + 1) * P[p]) / (1 - interior**2)
        step = dP[p] / d2P
        interior -= step
        if np.max(np.abs(step), initial=0.0) < tol:
            break
    x[1:-1] = interior
    x[0], x[-1] = -1.0, 1.0
    P, _ = legendre_table(p, x)
    weights = 2.0 / (p * (p + 1) * P[p] ** 2)
    return x, weights


def lagrange_derivative_matrix(nodes: np.ndarray) -> np.ndarray:
    """Differentiation matrix of the Lagrange interpolant (barycentric form)."""
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    bary = 1.0 / np.prod(diff, axis=1)
    D = (bary[None, :] / bary[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


def _endpoint_restriction(n: int) -> np.ndarray:
    R = np.zeros((2, n))
    R[0, 0] = 1.0
    R[1, -1] = 1.0
    return R


def lobatto_operators(p: int) -> SBPOperatorSet:
    """Nodal SBP operators on Gauss-Lobatto-Legendre nodes of degree *p*."""
    if not 1 <= p <= 20:
        raise ValueError(f"degree must lie in [1, 20], got {p}")
    nodes, weights = gauss_lobatto_legendre(p)
    D = lagrange_derivative_matrix(nodes)
    return SBPOperatorSet("lobatto", p, nodes, D, weights, _endpoint_restriction(p + 1))


def finite_volume_operators() -> SBPOperatorSet:
    """Degenerate p = 0 operator set: one cell average, ``D = 0``."""
    return SBPOperatorSet(
        "finite_volume",
        0,
        np.zeros(1),
        np.zeros((1, 1)),
        np.array([2.0]),
        np.ones((2, 1)),
    )


def fd_operators(n_nodes: int, order: int = 4) -> SBPOperatorSet:
    """Global diagonal-norm finite-difference SBP operator on [-1, 1].

    *order* is the interior accuracy: 2 (boundary order 1) or 4 (the classical
    Strand/Mattsson closure, boundary order 2).
    """
    if order == 2:
        minimum = 3
    elif order == 4:
        minimum = 8
    else:
        raise ValueError(f"unsupported interior order {order}")
    if n_nodes < minimum:
        raise ValueError(f"order-{order} operator needs at least {minimum} nodes")
    n = n_nodes
    h = 2.0 / (n - 1)
    D = np.zeros((n, n))
    weights = np.ones(n)
    if order == 2:
        for i in range(1, n - 1):
            D[i, i - 1], D[i, i + 1] = -0.5, 0.5
        D[0, :2] = [-1.0, 1.0]
        D[-1, -2:] = [-1.0, 1.0]
        weights[0] = weights[-1] = 0.5
    else:
        for i in range(4, n - 4):
            D[i, i - 2 : i + 3] = [1 / 12, -2 / 3, 0.0, 2 / 3, -1 / 12]
        block = np.array(
            [
                [-24 / 17, 59 / 34, -4 / 17, -3 / 34, 0.0, 0.0],
                [-1 / 2, 0.0, 1 / 2, 0.0, 0.0, 0.0],
                [4 / 43, -59 / 86, 0.0, 59 / 86, -4 / 43, 0.0],
                [3 / 98, 0.0, -59 / 98, 0.0, 32 / 49, -4 / 49],
            ]
        )
        D[:4, :6] = block
        D[-4:, -6:] = -block[::-1, ::-1]
        closure = np.array([17 / 48, 59 / 48, 43 / 48, 49 / 48])
        weights[:4] = closure
        weights[-4:] = closure[::-1]
    nodes = np.linspace(-1.0, 1.0, n)
    return SBPOperatorSet(
        f"fd{order}", order, nodes, D / h, weights * h, _endpoint_restriction(n)
    )


def verify_sbp(ops: SBPOperatorSet, tol: float = 1e-12) -> tuple[bool, float]:
    residual = ops.sbp_residual()
    return residual <= tol, residual


def legendre_vandermonde(nodes: np.ndarray) -> np.ndarray:
    """Orthonormal Legendre modes evaluated at *nodes*, shape (nodes, modes)."""
    order = nodes.size - 1
    P, _ = legendre_table(order, nodes)
    scale = np.sqrt((2 * np.arange(order + 1) + 1) / 2.0)
    return (P * scale[:, None]).T


def exponential_filter(p: int, order: int = 1, strength: float = 100.0) -> np.ndarray:
    """Nodal matrix of the modal exponential filter on GLL nodes.

    Mode ``k`` of the Legendre expansion is damped by
    ``exp(-strength * (k / p) ** (2 * order))``.
    """
    if order < 1:
        raise ValueError("filter order must be >= 1")
    if strength < 0:
        raise ValueError("filter strength must be nonnegative")
    nodes, _ = gauss_lobatto_legendre(p)
    V = legendre_vandermonde(nodes)
    sigma = filter_factors(p, order, strength)
    return V @ np.diag(sigma) @ np.linalg.inv(V)


def filter_factors(p: int, order: int = 1, strength: float = 100.0) -> np.ndarray:
    k = np.arange(p + 1)
    return np.exp(-strength * (k / p) ** (2 * order))
