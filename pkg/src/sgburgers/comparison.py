"""Finite-volume and finite-difference comparison solvers and the Rankine-Hugoniot audit.

The first-order finite-volume (FV) scheme uses the entropy-conservative flux
plus local Lax-Friedrichs dissipation scaled by a weight ``0 < omega <= 1``.
The finite-difference (FD) scheme reuses the split-form semidiscretization on
one global diagonal-norm SBP grid, with boundary data entering through the
interface flux (a SAT penalty), and adds undivided-difference artificial
dissipation of second and fourth order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from sgburgers.cpr import (
    BoundaryCondition,
    Mesh1D,
    Periodic,
    apply_boundary,
    semidiscrete_rhs,
)
from sgburgers.fluxes import FluxFunction, ec_flux, entropy_residual, llf_es_flux
from sgburgers.galerkin import entropy, entropy_flux, flux, max_abs_eigenvalue
from sgburgers.pc_basis import TripleProductTensor
from sgburgers.sbp import SBPOperatorSet, fd_operators


def _check_omega(omega: float):
    if not 0.0 < omega <= 1.0:
        raise ValueError(f"dissipation weight must lie in (0, 1], got {omega}")


def fv_face_fluxes(
    state,
    tensor: TripleProductTensor,
    bc: BoundaryCondition,
    omega: float = 1.0,
    base_flux: FluxFunction = ec_flux,
) -> np.ndarray:
    """Numerical fluxes at the ``N + 1`` cell faces.

    ``f = base_flux - omega/2 * lambda [u]``; the spectral radius is computed
    once per cell (and per ghost state) and maximized over the two neighbours.
    """
    _check_omega(omega)
    state = np.asarray(state, dtype=float)
    left, right = apply_boundary(bc, state[:, None, :])
    lam_cells = max_abs_eigenvalue(state, tensor)
    lam_left = np.empty(left.shape[0])
    lam_right = np.empty(left.shape[0])
    lam_left[1:] = lam_cells
    lam_right[:-1] = lam_cells
    if isinstance(bc, Periodic):
        lam_left[0] = lam_cells[-1]
        lam_right[-1] = lam_cells[0]
    else:
        ghosts = max_abs_eigenvalue(np.stack([left[0], right[-1]]), tensor)
        lam_left[0], lam_right[-1] = ghosts
    lam = np.maximum(lam_left, lam_right)
    return base_flux(left, right, tensor) - 0.5 * omega * lam[:, None] * (right - left)


def fv_rhs(
    state,
    mesh: Mesh1D,
    tensor: TripleProductTensor,
    bc: BoundaryCondition,
    omega: float = 1.0,
    base_flux: FluxFunction = ec_flux,
) -> np.ndarray:
    """``du_i/dt = -(f_{i+1/2} - f_{i-1/2}) / dx`` for cell averages of shape ``(N, M + 1)``."""
    state = np.asarray(state, dtype=float)
    if state.shape != (mesh.n_elements, tensor.size):
        raise ValueError(
            f"state shape {state.shape} does not match {(mesh.n_elements, tensor.size)}"
        )
    fnum = fv_face_fluxes(state, tensor, bc, omega, base_flux)
    return -(fnum[1:] - fnum[:-1]) / mesh.h


def fv_entropy_production(state, tensor, bc: BoundaryCondition, omega: float = 1.0) -> float:
    """Sum over interior faces of ``[u] . f - [psi]`` (nonpositive for ``omega > 0``)."""
    state = np.asarray(state, dtype=float)
    left, right = apply_boundary(bc, state[:, None, :])
    fnum = fv_face_fluxes(state, tensor, bc, omega)
    if isinstance(bc, Periodic):
        sl = slice(0, -1)
    else:
        sl = slice(1, -1)
    return float(np.sum(entropy_residual(left[sl], right[sl], fnum[sl], tensor)))


# Finite differences


class FDDissipation(enum.Enum):
    SECOND_AND_FOURTH = "second_and_fourth"
    FOURTH_ONLY = "fourth_only"


@dataclass(frozen=True)
class FDSolver:
    """Global-grid SBP finite-difference discretization on ``n_nodes`` nodes.

    ``c2`` and ``c4`` weight the second- and fourth-order artificial
    dissipation; both are scaled by the local spectral radius of ``A(u)``.
    """

    x_lo: float
    x_hi: float
    n_nodes: int
    order: int = 4
    dissipation: FDDissipation = FDDissipation.SECOND_AND_FOURTH
    c2: float = 0.5
    c4: float = 0.1

    def __post_init__(self):
        if self.n_nodes < 9:
            raise ValueError("FD grid needs at least 9 nodes (N >= 8)")
        if self.c2 < 0 or self.c4 < 0:
            raise ValueError("dissipation coefficients must be nonnegative")
        object.__setattr__(self, "dissipation", FDDissipation(self.dissipation))

    @property
    def mesh(self) -> Mesh1D:
        return Mesh1D(self.x_lo, self.x_hi, 1)

    @property
    def dx(self) -> float:
        return (self.x_hi - self.x_lo) / (self.n_nodes - 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.x_lo, self.x_hi, self.n_nodes)

    @property
    def operators(self) -> SBPOperatorSet:
        return _cached_fd_ops(self.n_nodes, self.order)

    @property
    def norm_weights(self) -> np.ndarray:
        """Physical diagonal norm ``H`` (quadrature weights on the grid)."""
        return 0.5 * (self.x_hi - self.x_lo) * self.operators.weights

    def dissipation_operator(self, state, tensor: TripleProductTensor) -> np.ndarray:
        """Artificial dissipation rate ``-(1/dx) Hn^-1 (c2 D1^T L D1 + c4 D2^T L D2) u``.

        ``D1``/``D2`` are undivided first/second differences, ``L`` the local
        spectral radius at the stencil centres and ``Hn = H / dx``.
        """
        u = np.asarray(state, dtype=float)
        lam = max_abs_eigenvalue(u, tensor)
        hn = self.norm_weights / self.dx
        out = np.zeros_like(u)
        c2 = self.c2 if self.dissipation is FDDissipation.SECOND_AND_FOURTH else 0.0
        if c2 > 0:
            d1 = u[1:] - u[:-1]
            flux1 = c2 * np.maximum(lam[1:], lam[:-1])[:, None] * d1
            # D1^T g: (D1^T g)_i = g_{i-1} - g_i
            out[1:] += flux1
            out[:-1] -= flux1
        if self.c4 > 0:
            d2 = u[2:] - 2.0 * u[1:-1] + u[:-2]
            g = self.c4 * lam[1:-1, None] * d2
            out[:-2] += g
            out[1:-1] -= 2.0 * g
            out[2:] += g
        return -out / (self.dx * hn[:, None])

    def rhs(
        self,
        state,
        tensor: TripleProductTensor,
        bc: BoundaryCondition,
        flux_fn: FluxFunction = llf_es_flux,
    ) -> np.ndarray:
        """Split form (``beta = 2/3``) on the global grid plus SAT boundary terms and dissipation."""
        u = np.asarray(state, dtype=float)
        if u.shape != (self.n_nodes, tensor.size):
            raise ValueError(f"state shape {u.shape} does not match {(self.n_nodes, tensor.size)}")
        central = semidiscrete_rhs(u[None], self.mesh, self.operators, tensor, flux_fn, bc)[0]
        return central + self.dissipation_operator(u, tensor)


_FD_CACHE: dict = {}


def _cached_fd_ops(n_nodes: int, order: int) -> SBPOperatorSet:
    key = (n_nodes, order)
    if key not in _FD_CACHE:
        _FD_CACHE[key] = fd_operators(n_nodes, order)
    return _FD_CACHE[key]


def fd_rhs(
    state,
    solver: FDSolver,
    tensor: TripleProductTensor,
    bc: BoundaryCondition,
    dissipation_mode=None,
) -> np.ndarray:
    """Rate of the FD scheme; *dissipation_mode* overrides the solver's setting."""
    if dissipation_mode is not None:
        solver = replace(solver, dissipation=FDDissipation(dissipation_mode))
    return solver.rhs(state, tensor, bc)


# Rankine-Hugoniot audit


@dataclass(frozen=True)
class DiscontinuityAudit:
    location: float
    speed: float
    jump: np.ndarray
    residual: float
    scaled_residual: float
    entropy_residual: float
    entropy_admissible: bool


def detect_discontinuities(
    values, factor: float = 10.0, min_jump: float = 1e-2, merge_gap: int = 2
) -> list[tuple[int, int]]:
    """Index ranges ``(i0, i1)`` whose neighbour jumps in *values* are anomalously large.

    A jump ``|v[i+1] - v[i]|`` is flagged when it exceeds both
    ``factor * median`` of all neighbour jumps and *min_jump*. Flagged jumps
    separated by at most *merge_gap* samples are merged; the returned range
    covers samples ``i0..i1`` so ``values[i0]`` and ``values[i1]`` lie on
    either side of the discontinuity.
    """
    v = np.asarray(values, dtype=float)
    jumps = np.abs(np.diff(v))
    if jumps.size == 0:
        return []
    threshold = max(factor * float(np.median(jumps)), min_jump)
    flagged = np.flatnonzero(jumps > threshold)
    ranges: list[tuple[int, int]] = []
    for i in flagged:
        if ranges and i - ranges[-1][1] <= merge_gap:
            ranges[-1] = (ranges[-1][0], i + 1)
        else:
            ranges.append((int(i), int(i) + 1))
    return ranges


def rankine_hugoniot_audit(
    x,
    profile,
    tensor: TripleProductTensor,
    factor: float = 10.0,
    min_jump: float = 1e-2,
    entropy_tol: float = 1e-8,
) -> list[DiscontinuityAudit]:
    """Check ``s [u_k] = [f_k]`` and ``[F] <= s [U]`` at every detected discontinuity.

    *profile* holds mode vectors sampled at ascending *x*. The speed is the
    least-squares solution ``s = sum [u_k][f_k] / sum [u_k]^2``; the scaled
    residual divides ``max_k |s [u_k] - [f_k]|`` by ``max_k |[u_k]|``.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(profile, dtype=float)
    out = []
    for i0, i1 in detect_discontinuities(u[:, 0], factor, min_jump):
        left, right = u[i0], u[i1]
        du = right - left
        df = flux(right, tensor) - flux(left, tensor)
        s = float(du @ df / (du @ du))
        residual = float(np.max(np.abs(s * du - df)))
        scale = float(np.max(np.abs(du)))
        dU = float(entropy(right) - entropy(left))
        dF = float(entropy_flux(right, tensor) - entropy_flux(left, tensor))
        ent = dF - s * dU
        out.append(
            DiscontinuityAudit(
                location=0.5 * (x[i0] + x[i1]),
                speed=s,
                jump=du,
                residual=residual,
                scaled_residual=residual / scale,
                entropy_residual=ent,
                entropy_admissible=ent <= entropy_tol,
            )
        )
    return out


__all__ = [
    "DiscontinuityAudit",
    "FDDissipation",
    "FDSolver",
    "detect_discontinuities",
    "fd_rhs",
    "fv_entropy_production",
    "fv_face_fluxes",
    "fv_rhs",
    "rankine_hugoniot_audit",
]
