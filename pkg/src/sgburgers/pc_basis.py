"""Orthogonal polynomial bases for the polynomial chaos expansion.

The evolved Galerkin system uses the normalized probabilists' Hermite
polynomials, orthonormal with respect to the standard Gaussian density.
Jacobi and Laguerre families appear only in the closed-form reference
solutions, using their classical (non-normalized) standardization.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

SQRT_2PI = math.sqrt(2.0 * math.pi)


def gaussian_density(xi):
    return np.exp(-0.5 * np.square(xi)) / SQRT_2PI


def hermite_eval(i: int, xi):
    """Normalized Hermite polynomial :math:`\\phi_i(\\xi)`.

    Uses the stable recurrence
    ``phi_{n+1} = (xi phi_n - sqrt(n) phi_{n-1}) / sqrt(n + 1)``.
    Accepts scalars or arrays for *xi*.
    """
    if i < 0:
        raise ValueError(f"degree must be nonnegative, got {i}")
    xi = np.asarray(xi, dtype=float)
    prev = np.zeros_like(xi)
    cur = np.ones_like(xi)
    for n in range(i):
        prev, cur = cur, (xi * cur - math.sqrt(n) * prev) / math.sqrt(n + 1)
    return cur if cur.ndim else float(cur)


def hermite_all(order: int, xi) -> np.ndarray:
    """All normalized Hermite polynomials up to *order*, stacked on axis 0."""
    xi = np.asarray(xi, dtype=float)
    out = np.empty((order + 1,) + xi.shape)
    out[0] = 1.0
    if order >= 1:
        out[1] = xi
    for n in range(1, order):
        out[n + 1] = (xi * out[n] - math.sqrt(n) * out[n - 1]) / math.sqrt(n + 1)
    return out


def weighted_eval(i: int, xi):
    """Return ``phi_i(xi) * omega(xi)`` with the Gaussian density ``omega``."""
    return hermite_eval(i, xi) * gaussian_density(xi)


def hermite_triple(i: int, j: int, k: int) -> float:
    """Exact triple product ``<phi_i phi_j phi_k>`` for normalized Hermite."""
    total = i + j + k
    if min(i, j, k) < 0 or total % 2:
        return 0.0
    s = total // 2
    if max(i, j, k) > s:
        return 0.0
    log_value = 0.5 * (math.lgamma(i + 1) + math.lgamma(j + 1) + math.lgamma(k + 1))
    log_value -= math.lgamma(s - i + 1) + math.lgamma(s - j + 1) + math.lgamma(s - k + 1)
    return math.exp(log_value)


def gauss_hermite(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss rule for the standard Gaussian density (Golub-Welsch).

    The weights sum to one.
    """
    if n < 1:
        raise ValueError("need at least one quadrature node")
    offdiag = np.sqrt(np.arange(1, n, dtype=float))
    jacobi_matrix = np.diag(offdiag, 1) + np.diag(offdiag, -1)
    nodes, vectors = np.linalg.eigh(jacobi_matrix)
    weights = vectors[0] ** 2
    return nodes, weights


def triple_quadrature_oracle(i: int, j: int, k: int, nodes: int) -> float:
    """Brute-force ``<phi_i phi_j phi_k>`` by Gauss-Hermite quadrature.

    An *n*-point rule is exact up to degree ``2n - 1``, so *nodes* must be at
    least ``(i + j + k) / 2 + 1``.
    """
    if 2 * nodes - 1 < i + j + k:
        raise ValueError(
            f"{nodes} nodes cannot integrate degree {i + j + k} exactly"
        )
    x, w = gauss_hermite(nodes)
    return float(np.sum(w * hermite_eval(i, x) * hermite_eval(j, x) * hermite_eval(k, x)))


@dataclass(frozen=True)
class TripleProductTensor:
    """Triple products ``<phi_i phi_j phi_k>`` for ``0 <= i, j, k <= order``.

    ``entries`` is the dense symmetric array (used by the vectorized flux
    kernels); ``nonzeros`` lists each distinct nonzero once with ``i <= j <= k``.
    """

    order: int
    entries: np.ndarray
    nonzeros: tuple[tuple[int, int, int, float], ...]

    @property
    def size(self) -> int:
        return self.order + 1

    def __call__(self, i: int, j: int, k: int) -> float:
        return float(self.entries[i, j, k])


@lru_cache(maxsize=None)
def build_tensor(order: int) -> TripleProductTensor:
    if order < 0:
        raise ValueError(f"PC order must be nonnegative, got {order}")
    n = order + 1
    entries = np.zeros((n, n, n))
    nonzeros = []
    for i in range(n):
        for j in range(i, n):
            for k in range(j, n):
                value = hermite_triple(i, j, k)
                if value == 0.0:
                    continue
                nonzeros.append((i, j, k, value))
                for a, b, c in {(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)}:
                    entries[a, b, c] = value
    entries.setflags(write=False)
    return TripleProductTensor(order, entries, tuple(nonzeros))


# Classical families for the generalized reference solutions


class FamilyKind(enum.Enum):
    HERMITE = "hermite"
    JACOBI = "jacobi"
    LAGUERRE = "laguerre"


@dataclass(frozen=True)
class OrthogonalFamily:
    """A classical orthogonal polynomial family with its Rodrigues data.

    Each family provides the weight ``omega``, the Rodrigues constants
    ``e_n`` and the quadratic ``Q`` such that

        phi_n = 1 / (e_n omega) * d^n/dxi^n (omega Q^n).

    ``shifted()`` is the family whose weight is ``omega * Q``. Hermite is the
    normalized probabilists' family, for which ``Q = 1`` and
    ``e_n = (-1)^n sqrt(n!)``; Jacobi and Laguerre use the classical
    standardization.
    """

    kind: FamilyKind
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if self.kind in (FamilyKind.JACOBI, FamilyKind.LAGUERRE) and self.alpha <= -1:
            raise ValueError(f"alpha must exceed -1, got {self.alpha}")
        if self.kind is FamilyKind.JACOBI and self.beta <= -1:
            raise ValueError(f"beta must exceed -1, got {self.beta}")

    @classmethod
    def hermite(cls) -> "OrthogonalFamily":
        return cls(FamilyKind.HERMITE)

    @classmethod
    def jacobi(cls, alpha: float, beta: float) -> "OrthogonalFamily":
        return cls(FamilyKind.JACOBI, float(alpha), float(beta))

    @classmethod
    def laguerre(cls, alpha: float) -> "OrthogonalFamily":
        return cls(FamilyKind.LAGUERRE, float(alpha))

    @property
    def support(self) -> tuple[float, float]:
        if self.kind is FamilyKind.JACOBI:
            return (-1.0, 1.0)
        if self.kind is FamilyKind.LAGUERRE:
            return (0.0, math.inf)
        return (-math.inf, math.inf)

    def clamp(self, xi):
        lo, hi = self.support
        return np.clip(xi, lo, hi)

    def weight(self, xi):
        xi = np.asarray(xi, dtype=float)
        if self.kind is FamilyKind.HERMITE:
            out = gaussian_density(xi)
        elif self.kind is FamilyKind.JACOBI:
            inside = (xi >= -1.0) & (xi <= 1.0)
            x = np.where(inside, xi, 0.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                w = (1.0 - x) ** self.alpha * (1.0 + x) ** self.beta
            out = np.where(inside, w, 0.0)
        else:
            inside = xi >= 0.0
            x = np.where(inside, xi, 1.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                w = x**self.alpha * np.exp(-x)
            out = np.where(inside, w, 0.0)
        return out if out.ndim else float(out)

    def quadratic(self, xi):
        xi = np.asarray(xi, dtype=float)
        if self.kind is FamilyKind.JACOBI:
            return 1.0 - xi**2
        if self.kind is FamilyKind.LAGUERRE:
            return xi
        return np.ones_like(xi)

    def rodrigues_constant(self, n: int) -> float:
        if self.kind is FamilyKind.JACOBI:
            return (-2.0) ** n * math.factorial(n)
        if self.kind is FamilyKind.LAGUERRE:
            return float(math.factorial(n))
        return (-1.0) ** n * math.sqrt(math.factorial(n))

    def shifted(self, times: int = 1) -> "OrthogonalFamily":
        if self.kind is FamilyKind.JACOBI:
            return OrthogonalFamily.jacobi(self.alpha + times, self.beta + times)
        if self.kind is FamilyKind.LAGUERRE:
            return OrthogonalFamily.laguerre(self.alpha + times)
        return self

    def norm_squared(self, n: int) -> float:
        """Closed-form ``<phi_n, phi_n>`` under this family's weight."""
        a, b = self.alpha, self.beta
        if self.kind is FamilyKind.JACOBI:
            log_value = (
                (a + b + 1) * math.log(2.0)
                - math.log(2 * n + a + b + 1)
                + math.lgamma(n + a + 1)
                + math.lgamma(n + b + 1)
                - math.lgamma(n + a + b + 1)
                - math.lgamma(n + 1)
            )
            return math.exp(log_value)
        if self.kind is FamilyKind.LAGUERRE:
            return math.exp(math.lgamma(n + a + 1) - math.lgamma(n + 1))
        return 1.0

    def eval(self, n: int, xi):
        return family_eval(self, n, xi)


def family_eval(family: OrthogonalFamily, n: int, xi):
    """Evaluate the degree-*n* member of *family* by its three-term recurrence."""
    if n < 0:
        raise ValueError(f"degree must be nonnegative, got {n}")
    if family.kind is FamilyKind.HERMITE:
        return hermite_eval(n, xi)
    xi = np.asarray(xi, dtype=float)
    a, b = family.alpha, family.beta
    prev = np.zeros_like(xi)
    cur = np.ones_like(xi)
    if n == 0:
        return cur if cur.ndim else float(cur)
    if family.kind is FamilyKind.JACOBI:
        prev, cur = cur, 0.5 * (a - b) + 0.5 * (a + b + 2.0) * xi
        for m in range(2, n + 1):
            c = 2 * m + a + b
            lead = 2 * m * (m + a + b) * (c - 2)
            nxt = (c - 1) * (c * (c - 2) * xi + a * a - b * b) * cur
            nxt -= 2 * (m + a - 1) * (m + b - 1) * c * prev
            prev, cur = cur, nxt / lead
    else:
        prev, cur = cur, 1.0 + a - xi
        for m in range(1, n):
            prev, cur = cur, ((2 * m + 1 + a - xi) * cur - (m + a) * prev) / (m + 1)
    return cur if cur.ndim else float(cur)
