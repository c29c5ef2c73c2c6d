"""Split-form SBP CPR semidiscretization of the Galerkin Burgers system.

The solution field has shape ``(N, n_nodes, M + 1)``: element, node, mode
(mode index fastest). Per element and mode ``k`` the semidiscretization is

    du_k/dt = -(2/h) [ 1/3 sum_ij T_ijk (D(u_i u_j) + u_j D u_i)
                       + M^-1 R^T B (f_k^num - sum_ij T_ijk (R(u_i u_j)/3
                                                          + (R u_i)(R u_j)/6)) ]

which is conservative across elements and entropy stable whenever the
interface flux is. Interface fluxes are evaluated once per face.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from sgburgers.fluxes import FluxFunction, entropy_residual
from sgburgers.galerkin import flux, flux_potential, max_abs_eigenvalue
from sgburgers.pc_basis import TripleProductTensor
from sgburgers.sbp import SBPOperatorSet


@dataclass(frozen=True)
class Mesh1D:
    x_lo: float
    x_hi: float
    n_elements: int

    def __post_init__(self):
        if self.n_elements < 1:
            raise ValueError("mesh needs at least one element")
        if not self.x_hi > self.x_lo:
            raise ValueError("empty domain")

    @property
    def h(self) -> float:
        return (self.x_hi - self.x_lo) / self.n_elements

    @property
    def faces(self) -> np.ndarray:
        return self.x_lo + self.h * np.arange(self.n_elements + 1)

    def node_coordinates(self, ops: SBPOperatorSet) -> np.ndarray:
        """Physical node positions, shape ``(N, n_nodes)``."""
        left = self.faces[:-1, None]
        return left + 0.5 * self.h * (ops.nodes[None, :] + 1.0)


@dataclass(frozen=True)
class Periodic:
    pass


@dataclass(frozen=True)
class InflowDirichlet:
    """Weakly imposed boundary states, entering through the interface flux."""

    left_state: np.ndarray
    right_state: np.ndarray

    def __post_init__(self):
        left = np.asarray(self.left_state, dtype=float)
        right = np.asarray(self.right_state, dtype=float)
        if left.shape != right.shape or left.ndim != 1:
            raise ValueError("inflow states must be mode vectors of equal order")
        object.__setattr__(self, "left_state", left)
        object.__setattr__(self, "right_state", right)


@dataclass(frozen=True)
class Outflow:
    pass


BoundaryCondition = Union[Periodic, InflowDirichlet, Outflow]


def apply_boundary(bc: BoundaryCondition, field: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Left and right states at every face, shape ``(N + 1, M + 1)`` each.

    Face ``e`` separates element ``e - 1`` from element ``e``. For periodic
    meshes face ``N`` duplicates face ``0``.
    """
    first = field[:, 0, :]
    last = field[:, -1, :]
    left = np.empty((field.shape[0] + 1, field.shape[2]))
    right = np.empty_like(left)
    left[1:] = last
    right[:-1] = first
    if isinstance(bc, Periodic):
        left[0] = last[-1]
        right[-1] = first[0]
    elif isinstance(bc, InflowDirichlet):
        if bc.left_state.size != field.shape[2]:
            raise ValueError("inflow state order does not match the field")
        left[0] = bc.left_state
        right[-1] = bc.right_state
    elif isinstance(bc, Outflow):
        left[0] = first[0]
        right[-1] = last[-1]
    else:
        raise TypeError(f"unknown boundary condition {bc!r}")
    return left, right


def face_fluxes(field, tensor, flux_fn: FluxFunction, bc: BoundaryCondition):
    left, right = apply_boundary(bc, field)
    if isinstance(bc, Periodic):
        fnum = np.empty_like(left)
        fnum[:-1] = flux_fn(left[:-1], right[:-1], tensor)
        fnum[-1] = fnum[0]
        return fnum
    return flux_fn(left, right, tensor)


def _check_shapes(field, mesh, ops, tensor):
    field = np.asarray(field, dtype=float)
    expected = (mesh.n_elements, ops.n_nodes, tensor.size)
    if field.shape != expected:
        raise ValueError(f"field shape {field.shape} does not match {expected}")
    return field


def semidiscrete_rhs(
    field,
    mesh: Mesh1D,
    ops: SBPOperatorSet,
    tensor: TripleProductTensor,
    flux_fn: FluxFunction,
    bc: BoundaryCondition,
) -> np.ndarray:
    field = _check_shapes(field, mesh, ops, tensor)
    f = flux(field, tensor)
    du = ops.D @ field
    volume = (2.0 * ops.D @ f + _apply_A(field, du, tensor)) / 3.0

    fnum = face_fluxes(field, tensor, flux_fn, bc)
    # R f and f(R u); equal on nodal bases containing the endpoints
    Rf = ops.R @ f
    Ru = ops.R @ field
    own = (2.0 / 3.0) * Rf + flux(Ru, tensor) / 3.0
    common = np.stack([fnum[:-1], fnum[1:]], axis=1)
    surface = ops.lifting @ (common - own)
    return -(2.0 / mesh.h) * (volume + surface)


def skewsym_rhs_lobatto(
    field,
    mesh: Mesh1D,
    ops: SBPOperatorSet,
    tensor: TripleProductTensor,
    flux_fn: FluxFunction,
    bc: BoundaryCondition,
    beta: float = 2.0 / 3.0,
) -> np.ndarray:
    """Matrix form ``-(beta/2) D(A_G u) - (1-beta) A_G D u - M^-1 R^T B (f^num - R(A_G u)/2)``.

    ``A_G`` applies ``A(u)`` node by node. Only valid on nodal operators that
    include both endpoints; ``beta = 2/3`` reproduces :func:`semidiscrete_rhs`.
    """
    if ops.kind != "lobatto":
        raise ValueError("skew-symmetric matrix form requires Gauss-Lobatto-Legendre nodes")
    field = _check_shapes(field, mesh, ops, tensor)
    Au = 2.0 * flux(field, tensor)
    du = ops.D @ field
    volume = 0.5 * beta * ops.D @ Au + (1.0 - beta) * _apply_A(
        field, du, tensor
    )
    fnum = face_fluxes(field, tensor, flux_fn, bc)
    common = np.stack([fnum[:-1], fnum[1:]], axis=1)
    own = 0.5 * ops.R @ Au
    surface = ops.lifting @ (common - own)
    return -(2.0 / mesh.h) * (volume + surface)


def _apply_A(u, v, tensor):
    """``A(u) v`` at every node: ``sum_ij T_ijk u_i v_j``."""
    n = tensor.size
    outer = (u[..., :, None] * v[..., None, :]).reshape(u.shape[:-1] + (n * n,))
    return outer @ tensor.entries.reshape(n * n, n)


def total_entropy(field, mesh: Mesh1D, ops: SBPOperatorSet) -> float:
    """``sum_e (h/2) sum_k u_k^T M u_k / 2``."""
    field = np.asarray(field, dtype=float)
    return float(0.25 * mesh.h * np.einsum("n,enk,enk->", ops.weights, field, field))


def total_mass(field, mesh: Mesh1D, ops: SBPOperatorSet) -> np.ndarray:
    field = np.asarray(field, dtype=float)
    return 0.5 * mesh.h * np.einsum("n,enk->k", ops.weights, field)


def entropy_rate(field, rhs, mesh: Mesh1D, ops: SBPOperatorSet) -> float:
    """Semidiscrete entropy rate ``sum_e (h/2) sum_k u_k^T M (du_k/dt)``."""
    return float(0.5 * mesh.h * np.einsum("n,enk,enk->", ops.weights, field, rhs))


def face_entropy_production(field, tensor, flux_fn: FluxFunction, bc: BoundaryCondition) -> float:
    """Entropy rate predicted from the interfaces alone.

    Interior faces contribute ``[u] . f^num - [psi]``; boundary faces of a
    non-periodic mesh contribute the one-sided terms ``u . f^num - psi`` at
    the left end and ``-(u . f^num - psi)`` at the right end, with *u* the
    interior trace.
    """
    left, right = apply_boundary(bc, field)
    fnum = face_fluxes(field, tensor, flux_fn, bc)
    if isinstance(bc, Periodic):
        return float(np.sum(entropy_residual(left[:-1], right[:-1], fnum[:-1], tensor)))
    interior = np.sum(entropy_residual(left[1:-1], right[1:-1], fnum[1:-1], tensor))
    u_lo, u_hi = right[0], left[-1]
    lo = u_lo @ fnum[0] - flux_potential(u_lo, tensor)
    hi = u_hi @ fnum[-1] - flux_potential(u_hi, tensor)
    return float(interior + lo - hi)


def apply_filter(field, filter_matrix: np.ndarray) -> np.ndarray:
    """Apply a nodal filter matrix in every element and mode."""
    field = np.asarray(field, dtype=float)
    if filter_matrix.shape != (field.shape[1],) * 2:
        raise ValueError("filter degree does not match the field")
    return filter_matrix @ field


def cfl_time_step(field, mesh: Mesh1D, ops: SBPOperatorSet, tensor, cfl: float = 0.1) -> float:
    """``dt = cfl * h / ((2p + 1) lambda_max)`` for the current state."""
    lam = float(np.max(max_abs_eigenvalue(field, tensor)))
    return cfl * mesh.h / ((2 * ops.degree + 1) * max(lam, 1e-12))
