"""Physical parameters, their dimensionless reduction and the two energy formulas.

Everything downstream is dimensionless: lengths in units of ``sqrt(hbar/(m omega))``
(the variable ``xi``) and energies in units of ``hbar omega``.  The only
relativistic knob is ``N = m c^2 / (hbar omega)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ComplexSpectrum, InvalidInput

__all__ = [
    "PhysicalParams",
    "ModelParams",
    "EnergyPair",
    "derive_dimensionless",
    "energy_exact",
    "energy_perturbative",
]


@dataclass(frozen=True)
class PhysicalParams:
    m: float
    omega: float
    hbar: float
    c: float

    def __post_init__(self):
        for name in ("m", "omega", "hbar", "c"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise InvalidInput(f"{name} must be a positive finite number, got {value!r}")

    @property
    def N(self) -> float:
        return self.m * self.c**2 / (self.hbar * self.omega)

    @property
    def curvature(self) -> float:
        """Scalar curvature ``-2 omega^2 / c^2`` in physical units."""
        return -2.0 * self.omega**2 / self.c**2

    @property
    def length_unit(self) -> float:
        return math.sqrt(self.hbar / (self.m * self.omega))


def _spectral_constant(N: float, lam: float) -> float:
    disc = 1.0 + 4.0 * N * (N - lam)
    if not disc > 0:
        raise ComplexSpectrum(f"1 + 4N(N - lambda) = {disc!r} <= 0 for N={N!r}, lambda={lam!r}")
    return 0.5 * math.sqrt(disc)


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless model.

    Build with :meth:`from_lambda` or :meth:`from_sigma`; both couplings are
    stored and kept consistent (``sigma == N * lambda``).
    """

    N: float
    lam: float
    sigma: float
    Nlambda: float

    def __post_init__(self):
        if not (self.N > 0 and math.isfinite(self.N)):
            raise InvalidInput(f"N must be positive and finite, got {self.N!r}")
        if not math.isclose(self.sigma, self.N * self.lam, rel_tol=1e-15, abs_tol=1e-300):
            raise InvalidInput("sigma must equal N * lambda")
        if self.Nlambda != _spectral_constant(self.N, self.lam):
            raise InvalidInput("Nlambda inconsistent with (N, lambda)")

    @classmethod
    def from_lambda(cls, N: float, lam: float) -> "ModelParams":
        N, lam = float(N), float(lam)
        return cls(N=N, lam=lam, sigma=N * lam, Nlambda=_spectral_constant(N, lam))

    @classmethod
    def from_sigma(cls, N: float, sigma: float) -> "ModelParams":
        N, sigma = float(N), float(sigma)
        lam = sigma / N
        # keep sigma exactly as given; lambda carries the rounding
        return cls(N=N, lam=lam, sigma=sigma, Nlambda=_spectral_constant(N, lam))

    @property
    def chi(self) -> float:
        """Gravitational coupling ``N lambda / 2``."""
        return 0.5 * self.sigma

    @property
    def curvature(self) -> float:
        """Scalar curvature in units of ``m omega / hbar`` (inverse xi squared)."""
        return -2.0 / self.N

    def c_n(self, n: int) -> float:
        """Weight exponent (and full energy in hbar omega units) of level ``n``."""
        return 0.5 + self.Nlambda + n

    def nlambda_minus_N(self) -> float:
        # (Nlambda^2 - N^2) / (Nlambda + N), free of cancellation at large N
        return (0.25 - self.sigma) / (self.Nlambda + self.N)

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "lambda": self.lam,
            "sigma": self.sigma,
            "Nlambda": self.Nlambda,
            "chi": self.chi,
            "curvature": self.curvature,
        }


def derive_dimensionless(phys: PhysicalParams, lam: float) -> ModelParams:
    return ModelParams.from_lambda(phys.N, lam)


@dataclass(frozen=True)
class EnergyPair:
    total: float
    rest_subtracted: float


def _check_level(n) -> int:
    if int(n) != n or n < 0:
        raise InvalidInput(f"level index must be a non-negative integer, got {n!r}")
    return int(n)


def energy_exact(params: ModelParams, n: int) -> EnergyPair:
    """Exact level ``1/2 + N_lambda + n`` with and without the rest energy ``N``."""
    n = _check_level(n)
    rest = 0.5 + n + params.nlambda_minus_N()
    return EnergyPair(total=params.c_n(n), rest_subtracted=rest)


def energy_perturbative(params: ModelParams, n: int) -> float:
    """First-order level ``(1/2 + n) + (1 - 4 sigma) / (8N)``, rest energy removed."""
    n = _check_level(n)
    return 0.5 + n + (1.0 - 4.0 * params.sigma) / (8.0 * params.N)
