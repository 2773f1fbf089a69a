"""Exception hierarchy.

Errors split into two families so the command line front-end can map them
onto exit codes: invalid input (2) and internal numerical failure (3).
"""


class RhoLabError(Exception):
    """Base class for every error raised by the package."""


class InvalidInput(RhoLabError, ValueError):
    """Parameters outside the admissible domain."""


class NumericalFailure(RhoLabError, ArithmeticError):
    """A computation that should have succeeded did not."""


class ComplexSpectrum(InvalidInput):
    """``1 + 4N(N - lambda) <= 0``: the spectral constant is not real."""


class DivergentIntegral(NumericalFailure):
    """A moment integral outside its region of convergence."""


class NonConvergence(NumericalFailure):
    """Adaptive quadrature failed to reach the requested tolerance."""


class DecompositionFailure(NumericalFailure):
    """An operator image is not a single member of the eigenstate family."""


class ConventionMismatch(NumericalFailure):
    """Closed-form normalization disagrees with the numerical norm."""


class InconsistentSystem(NumericalFailure):
    """Least-squares residual too large for the measure ansatz."""


class DegenerateLevels(NumericalFailure):
    """Vanishing energy denominator in first-order perturbation theory."""
