"""Entropy-stable split-form SBP CPR solvers for the stochastic Galerkin Burgers system."""

from sgburgers.galerkin import (
    Moments,
    assemble_A,
    eigenvalues,
    entropy,
    entropy_flux,
    flux,
    flux_potential,
    moments,
)
from sgburgers.pc_basis import build_tensor, hermite_eval, hermite_triple

__all__ = [
    "Moments",
    "assemble_A",
    "build_tensor",
    "eigenvalues",
    "entropy",
    "entropy_flux",
    "flux",
    "flux_potential",
    "hermite_eval",
    "hermite_triple",
    "moments",
]
