"""Coefficient algebra for the two closed function families.

``WeightedPoly(s, P, N)`` denotes ``(1 + xi^2/N)^(-s/2) P(xi)``, i.e. ``alpha^-s P``;
it houses the exact eigenstates.  ``GaussPoly(P)`` denotes ``exp(-xi^2/2) P(xi)``
and houses the perturbative states.  Polynomials are monomial coefficient
arrays, lowest power first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.polynomial import hermite as H
from numpy.polynomial import polynomial as P
from scipy.special import gammaln

__all__ = [
    "Poly",
    "WeightedPoly",
    "GaussPoly",
    "wp_differentiate",
    "wp_multiply",
    "gp_differentiate",
    "gp_mul_xi",
    "hermite_expand",
    "hermite_reconstruct",
    "oscillator_function",
]


def _as_coeffs(coeffs) -> np.ndarray:
    c = np.asarray(coeffs)
    if c.dtype == object:
        c = np.array([Fraction(x) for x in c.ravel()], dtype=object)
    else:
        c = np.array(c, dtype=float).ravel()
    nz = np.flatnonzero(c)
    c = c[: nz[-1] + 1] if nz.size else c[:0]
    c.setflags(write=False)
    return c


@dataclass(frozen=True, eq=False)
class Poly:
    """Polynomial in ``xi``.

    Coefficients are floats, or ``Fraction`` objects (an object array) when
    built from exact data; exact polynomials stay exact under ``+``, ``*``
    and differentiation as long as the other operand is exact or a scalar.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeffs(self.coeffs))

    @classmethod
    def exact(cls, coeffs) -> "Poly":
        return cls(np.array([Fraction(x) for x in coeffs], dtype=object))

    @property
    def is_exact(self) -> bool:
        return self.coeffs.dtype == object

    def to_float(self) -> "Poly":
        return Poly(self.coeffs.astype(float)) if self.is_exact else self

    @classmethod
    def monomial(cls, k: int, value: float = 1.0) -> "Poly":
        c = np.zeros(k + 1)
        c[k] = value
        return cls(c)

    @property
    def degree(self) -> int:
        # the zero polynomial has degree -1
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs.astype(float)))) if self.coeffs.size else 0.0

    def __call__(self, xi):
        if self.is_zero():
            return np.zeros_like(np.asarray(xi, dtype=float))
        return P.polyval(xi, self.coeffs.astype(float))

    def __add__(self, other: "Poly") -> "Poly":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        return Poly(P.polyadd(self.coeffs, other.coeffs))

    def __neg__(self) -> "Poly":
        return Poly(-self.coeffs)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if isinstance(other, Poly):
            if self.is_zero() or other.is_zero():
                return Poly([])
            return Poly(P.polymul(self.coeffs, other.coeffs))
        if self.is_exact:
            return Poly(self.coeffs * Fraction(other))
        return Poly(self.coeffs * float(other))

    __rmul__ = __mul__

    def deriv(self, m: int = 1) -> "Poly":
        if self.degree < m:
            return Poly([])
        return Poly(P.polyder(self.coeffs, m))

    def mul_xi(self, power: int = 1) -> "Poly":
        if self.is_zero():
            return self
        pad = np.array([Fraction(0)] * power, dtype=object) if self.is_exact else np.zeros(power)
        return Poly(np.concatenate([pad, self.coeffs]))

    def allclose(self, other: "Poly", rtol: float = 1e-12) -> bool:
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.pad(self.coeffs.astype(float), (0, n - len(self.coeffs)))
        b = np.pad(other.coeffs.astype(float), (0, n - len(other.coeffs)))
        scale = max(np.max(np.abs(a), initial=0.0), np.max(np.abs(b), initial=0.0), 1e-300)
        return bool(np.max(np.abs(a - b), initial=0.0) <= rtol * scale)

    def __repr__(self):
        return f"Poly({[float(c) for c in self.coeffs]})"


def alpha_sq(N: float) -> Poly:
    """``1 + xi^2 / N``."""
    return Poly([1.0, 0.0, 1.0 / N])


@dataclass(frozen=True, eq=False)
class WeightedPoly:
    s: float
    poly: Poly
    N: float

    def __post_init__(self):
        if not isinstance(self.poly, Poly):
            object.__setattr__(self, "poly", Poly(self.poly))

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        return (1.0 + xi**2 / self.N) ** (-0.5 * self.s) * self.poly(xi)

    def scale(self, factor: float) -> "WeightedPoly":
        return WeightedPoly(self.s, self.poly * factor, self.N)

    def raise_weight(self, s_new: float) -> "WeightedPoly":
        """Rewrite at a larger exponent: ``alpha^-s P = alpha^-(s+2j) (alpha^2)^j P``."""
        j = (s_new - self.s) / 2.0
        if j < 0 or abs(j - round(j)) > 1e-12:
            raise ValueError(f"cannot raise weight {self.s} to {s_new}")
        poly = self.poly
        a2 = alpha_sq(self.N)
        for _ in range(int(round(j))):
            poly = poly * a2
        return WeightedPoly(s_new, poly, self.N)

    def __add__(self, other: "WeightedPoly") -> "WeightedPoly":
        if other.N != self.N:
            raise ValueError("WeightedPoly operands live at different N")
        s = max(self.s, other.s)
        a, b = self.raise_weight(s), other.raise_weight(s)
        return WeightedPoly(s, a.poly + b.poly, self.N)

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, WeightedPoly):
            return wp_multiply(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def mul_xi(self) -> "WeightedPoly":
        return WeightedPoly(self.s, self.poly.mul_xi(), self.N)

    def deriv(self) -> "WeightedPoly":
        return wp_differentiate(self)

    @classmethod
    def alpha_power(cls, k: float, N: float) -> "WeightedPoly":
        """``alpha^k`` as a member of the family."""
        return cls(-k, Poly([1.0]), N)


def wp_differentiate(f: WeightedPoly) -> WeightedPoly:
    """``d/dxi`` of ``alpha^-s P`` as ``alpha^-(s+2) [(1 + xi^2/N) P' - (s/N) xi P]``."""
    dP = f.poly.deriv() * alpha_sq(f.N)
    return WeightedPoly(f.s + 2.0, dP - f.poly.mul_xi() * (f.s / f.N), f.N)


def wp_multiply(f: WeightedPoly, g: WeightedPoly) -> WeightedPoly:
    if f.N != g.N:
        raise ValueError("WeightedPoly operands live at different N")
    return WeightedPoly(f.s + g.s, f.poly * g.poly, f.N)


@dataclass(frozen=True, eq=False)
class GaussPoly:
    poly: Poly

    def __post_init__(self):
        if not isinstance(self.poly, Poly):
            object.__setattr__(self, "poly", Poly(self.poly))

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        return np.exp(-0.5 * xi**2) * self.poly(xi)

    def __add__(self, other: "GaussPoly") -> "GaussPoly":
        return GaussPoly(self.poly + other.poly)

    def __neg__(self):
        return GaussPoly(-self.poly)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, factor):
        if isinstance(factor, Poly):
            return GaussPoly(self.poly * factor)
        return GaussPoly(self.poly * float(factor))

    __rmul__ = __mul__

    def deriv(self, m: int = 1) -> "GaussPoly":
        out = self
        for _ in range(m):
            out = gp_differentiate(out)
        return out

    def mul_xi(self, power: int = 1) -> "GaussPoly":
        return GaussPoly(self.poly.mul_xi(power))


def gp_differentiate(f: GaussPoly) -> GaussPoly:
    return GaussPoly(f.poly.deriv() - f.poly.mul_xi())


def gp_mul_xi(f: GaussPoly) -> GaussPoly:
    return GaussPoly(f.poly.mul_xi())


def _phi_scale(k: np.ndarray) -> np.ndarray:
    # e^{-xi^2/2} H_k = pi^{1/4} sqrt(2^k k!) phi_k
    k = np.asarray(k, dtype=float)
    return np.exp(0.25 * math.log(math.pi) + 0.5 * (k * math.log(2.0) + gammaln(k + 1.0)))


def hermite_expand(f: GaussPoly) -> np.ndarray:
    """Coefficients of ``f`` over the normalized oscillator functions ``phi_k``.

    The expansion is finite: ``len(result) == f.poly.degree + 1``.
    """
    if f.poly.is_zero():
        return np.zeros(0)
    h = H.poly2herm(f.poly.coeffs)
    return h * _phi_scale(np.arange(len(h)))


def hermite_reconstruct(coeffs) -> GaussPoly:
    """Inverse of :func:`hermite_expand`."""
    c = np.asarray(coeffs, dtype=float)
    if c.size == 0:
        return GaussPoly(Poly([]))
    return GaussPoly(Poly(H.herm2poly(c / _phi_scale(np.arange(len(c))))))


def oscillator_function(k: int) -> GaussPoly:
    """``phi_k = pi^{-1/4} e^{-xi^2/2} H_k(xi) / sqrt(2^k k!)``."""
    c = np.zeros(k + 1)
    c[k] = 1.0
    return hermite_reconstruct(c)
