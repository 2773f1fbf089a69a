"""First-order relativistic Hamiltonian, its non-Hermiticity and the measure that cures it.

In units of hbar omega with lengths in xi the rest-subtracted Hamiltonian is

    H = -1/2 d^2 + 1/2 xi^2
        + (1/N) [ -1/8 d^4 - 3/4 xi^2 d^2 - 1/2 xi d - 1/8 xi^4 + 1/4 (1 - 2 sigma) ] + O(1/N^2).

Matrix elements are taken between normalized oscillator functions ``phi_k``
and computed exactly with Gaussian moments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import OperatorMatrix
from .errors import DegenerateLevels, InconsistentSystem
from .exact import exact_state
from .measures import Flat, MeasureSpec, Perturbed, integrate
from .model import ModelParams
from .polyalg import GaussPoly, Poly, hermite_reconstruct
from .relhermite import hermite_std

__all__ = [
    "Term",
    "PerturbedHamiltonian",
    "perturbed_hamiltonian",
    "apply_hamiltonian",
    "hamiltonian_matrix",
    "hermiticity_defect",
    "MeasureFit",
    "solve_perturbed_measure",
    "PerturbativeState",
    "perturbative_state",
    "RSResult",
    "rs_first_order",
    "compare_exact_vs_perturbative",
    "u_map_loworder",
]


@dataclass(frozen=True, eq=False)
class Term:
    """``coeff(xi) * d^deriv`` carrying a factor ``N^-order``."""

    deriv: int
    coeff: Poly
    order: int


@dataclass(frozen=True, eq=False)
class PerturbedHamiltonian:
    params: ModelParams
    terms: tuple[Term, ...]

    def truncated(self, max_order: int) -> "PerturbedHamiltonian":
        return PerturbedHamiltonian(self.params, tuple(t for t in self.terms if t.order <= max_order))


def perturbed_hamiltonian(params: ModelParams) -> PerturbedHamiltonian:
    F = Fraction
    terms = (
        Term(2, Poly.exact([F(-1, 2)]), 0),
        Term(0, Poly.exact([0, 0, F(1, 2)]), 0),
        Term(4, Poly.exact([F(-1, 8)]), 1),
        Term(2, Poly.exact([0, 0, F(-3, 4)]), 1),
        Term(1, Poly.exact([0, F(-1, 2)]), 1),
        Term(0, Poly.exact([0, 0, 0, 0, F(-1, 8)]), 1),
        Term(0, Poly.exact([F(1, 4) * (1 - 2 * F(params.sigma))]), 1),
    )
    return PerturbedHamiltonian(params, terms)


def apply_hamiltonian(h: PerturbedHamiltonian, f: GaussPoly, order: int | None = None) -> GaussPoly:
    """``H f`` inside the Gaussian family.

    With ``order=None`` the terms are summed at ``h.params.N``; with an integer
    only the coefficient of ``N^-order`` is returned.  Exact input gives exact
    output.
    """
    exact = f.poly.is_exact
    N = Fraction(h.params.N) if exact else h.params.N
    out = Poly([])
    derivs = {}
    for t in h.terms:
        if order is not None and t.order != order:
            continue
        if t.deriv not in derivs:
            derivs[t.deriv] = f.deriv(t.deriv).poly
        coeff = t.coeff if exact else t.coeff.to_float()
        if order is None:
            coeff = coeff * N ** -t.order
        out = out + derivs[t.deriv] * coeff
    return GaussPoly(out)


def hamiltonian_matrix(h: PerturbedHamiltonian, nmax: int, measure: MeasureSpec = Flat(),
                       order: int | None = None) -> OperatorMatrix:
    """``M[m, n] = int phi_m (H phi_n) dmu`` for ``m, n <= nmax``.

    ``order=None`` evaluates at the model's ``N`` with the measure factor
    ``1 + a xi^2/N`` kept exactly.  ``order=0`` or ``1`` returns the
    coefficient of ``N^-order`` in the expansion, the measure contributing
    strictly to first order (no ``1/N^2`` cross terms).
    """
    N = h.params.N
    size = nmax + 1
    # unnormalized e^{-xi^2/2} H_k in exact arithmetic; phi_k = norm_k times that
    herm = [GaussPoly(hermite_std(k, exact=True)) for k in range(size)]
    norm = [math.pi ** -0.25 / math.sqrt(2.0**k * math.factorial(k)) for k in range(size)]
    a = Fraction(measure.a) if isinstance(measure, Perturbed) else Fraction(0)
    M = np.zeros((size, size))
    for n in range(size):
        if order is None:
            Hphi = apply_hamiltonian(h, herm[n])
            for m in range(size):
                M[m, n] = norm[m] * norm[n] * integrate(herm[m], Hphi, measure, N=N)
            continue
        Hphi = apply_hamiltonian(h, herm[n], order=order)
        if order >= 1 and a:
            xi2 = Poly.exact([0, 0, a])
            Hphi = Hphi + apply_hamiltonian(h, herm[n], order=order - 1) * xi2
        for m in range(size):
            M[m, n] = norm[m] * norm[n] * integrate(herm[m], Hphi, Flat())
    return OperatorMatrix(M, "oscillator", measure, nmax, "hamiltonian_perturbed", 4,
                          (0, max(size - 4, 1)))


def hermiticity_defect(h: PerturbedHamiltonian, nmax: int, measure: MeasureSpec = Flat(),
                       order: int | None = None) -> tuple[np.ndarray, float]:
    """``M - M^T`` and its largest entry in absolute value."""
    M = hamiltonian_matrix(h, nmax, measure, order).entries
    D = M - M.T
    return D, float(np.max(np.abs(D)))


@dataclass(frozen=True)
class MeasureFit:
    a: float
    residual: float


def solve_perturbed_measure(h: PerturbedHamiltonian, nmax: int, tol: float = 1e-8) -> MeasureFit:
    """Find ``a`` in ``dmu = (1 + a xi^2/N) dxi`` making ``H`` symmetric at order ``1/N``.

    The order-``1/N`` defect is affine in ``a``: ``D(a) = D_H + a D_mu``, every
    off-diagonal entry giving one equation.  The overdetermined system is
    solved by least squares.
    """
    if nmax < 6:
        raise ValueError("nmax must be at least 6")
    D_H, _ = hermiticity_defect(h, nmax, Flat(), order=1)
    D_1, _ = hermiticity_defect(h, nmax, Perturbed(1.0), order=1)
    D_mu = D_1 - D_H
    off = ~np.eye(nmax + 1, dtype=bool)
    A = D_mu[off][:, None]
    rhs = -D_H[off]
    sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    a = float(sol[0])
    residual = float(np.max(np.abs(A[:, 0] * a - rhs)))
    if residual > tol:
        raise InconsistentSystem(f"least-squares residual {residual:.3g} for a = {a!r}")
    return MeasureFit(a, residual)


# -- perturbative states ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PerturbativeState:
    n: int
    gp: GaussPoly
    basis_coeffs: dict

    def __call__(self, xi):
        return self.gp(xi)


def _mixing(n: int, N: float) -> dict:
    """First-order admixtures of ``phi_{n+-2}``, ``phi_{n+-4}`` (zero-prefactor terms dropped)."""
    out = {}
    up4 = math.sqrt((n + 1) * (n + 2) * (n + 3) * (n + 4))
    up2 = 4.0 * math.sqrt((n + 1) * (n + 2))
    down2 = 4.0 * math.sqrt(n * (n - 1))
    down4 = -math.sqrt(n * (n - 1) * (n - 2) * (n - 3))
    for k, v in ((n + 4, up4), (n + 2, up2), (n - 2, down2), (n - 4, down4)):
        if k >= 0:
            out[k] = v / (16.0 * N)
        else:
            # prefactor vanishes for exactly these indices
            assert v == 0.0
    return out


def perturbative_state(params: ModelParams, n: int, normalized: bool = True) -> PerturbativeState:
    """``phi~_n`` (``normalized=False``) or ``Phi_n`` to first order in ``1/N``.

    ``Phi_n`` is the closed-form first-order expansion, normalized under
    ``(1 - xi^2/N) dxi``; ``phi~_n`` is the Rayleigh-Schroedinger vector with
    unit weight on ``phi_n``.
    """
    N = params.N
    coeffs = _mixing(n, N)
    coeffs[n] = 1.0 + ((2 * n + 1) / (4.0 * N) if normalized else 0.0)
    coeffs = dict(sorted(coeffs.items()))
    vec = np.zeros(n + 5)
    for k, v in coeffs.items():
        vec[k] = v
    return PerturbativeState(n, hermite_reconstruct(vec), coeffs)


@dataclass(frozen=True)
class RSResult:
    shift: float
    mixing: dict


def rs_first_order(h: PerturbedHamiltonian, nmax: int, n: int, tol: float = 1e-12) -> RSResult:
    """Textbook first-order Rayleigh-Schroedinger on the flat-measure matrix.

    No inner product is needed for eigenvector perturbation of a matrix, so the
    non-symmetric ``M`` is used as is:
    ``shift = M_nn - E0_n`` and ``c_m = M_mn / (E0_n - E0_m)``.
    """
    if n + 4 > nmax:
        raise ValueError("need n + 4 <= nmax")
    M0 = hamiltonian_matrix(h, nmax, Flat(), order=0).entries
    M = hamiltonian_matrix(h, nmax, Flat()).entries
    E0 = np.diag(M0)
    mixing = {}
    for m in range(nmax + 1):
        if m == n:
            continue
        gap = E0[n] - E0[m]
        if abs(gap) < tol:
            raise DegenerateLevels(f"levels {n} and {m} are degenerate")
        c = M[m, n] / gap
        if c != 0.0:
            mixing[m] = float(c)
    return RSResult(float(M[n, n] - E0[n]), mixing)


def compare_exact_vs_perturbative(params: ModelParams, n: int,
                                  grid=None) -> tuple[float, float]:
    """Sup-norm of ``Psi'_n - Phi_n`` on ``xi in [-4, 4]`` and that value times ``N^2``."""
    xi = np.linspace(-4.0, 4.0, 2001) if grid is None else np.asarray(grid)
    diff = float(np.max(np.abs(exact_state(params, n)(xi) - perturbative_state(params, n)(xi))))
    return diff, diff * params.N**2


def u_map_loworder(params: ModelParams, n: int) -> float:
    """``1 + (n + 1/2) / (2N)``, the first-order amplitude of the covariant-to-minimal map."""
    return 1.0 + (n + 0.5) / (2.0 * params.N)
