"""Verification lab for the relativistic harmonic oscillator on 1+1 anti-de Sitter space.

Exact eigenstates are built from relativistic Hermite polynomials weighted by
``alpha^-c_n`` with ``alpha^2 = 1 + xi^2/N``; the first-order ``1/N``
Hamiltonian is analysed in an oscillator basis, including the deformed
measure that makes it symmetric.
"""
from .errors import (ComplexSpectrum, ConventionMismatch, DecompositionFailure, DegenerateLevels,
                     DivergentIntegral, InconsistentSystem, InvalidInput, NonConvergence,
                     NumericalFailure, RhoLabError)
from .model import (EnergyPair, ModelParams, PhysicalParams, derive_dimensionless, energy_exact,
                    energy_perturbative)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ModelParams",
    "PhysicalParams",
    "EnergyPair",
    "derive_dimensionless",
    "energy_exact",
    "energy_perturbative",
    "RhoLabError",
    "InvalidInput",
    "NumericalFailure",
    "ComplexSpectrum",
    "DivergentIntegral",
    "NonConvergence",
    "DecompositionFailure",
    "ConventionMismatch",
    "InconsistentSystem",
    "DegenerateLevels",
]
