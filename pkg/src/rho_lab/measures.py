"""Integration against the weights of the theory.

Production integrals go through closed-form moments:

    int xi^{2k} (1 + xi^2/N)^{-s/2} dxi = N^{k+1/2} B(k + 1/2, s/2 - k - 1/2)
    int xi^{2k} exp(-xi^2) dxi          = Gamma(k + 1/2)

:func:`integrate_numeric` is an independent adaptive-quadrature oracle used by
the tests and the acceptance suite only.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np
from scipy import integrate as _quad
from scipy.special import gammaln

from .errors import DivergentIntegral, NonConvergence
from .polyalg import GaussPoly, Poly, WeightedPoly

__all__ = [
    "Flat",
    "PowerWeight",
    "Perturbed",
    "GaussianNative",
    "MeasureSpec",
    "alpha_moment",
    "alpha_moments",
    "gamma_half_ratio",
    "gauss_moment",
    "integrate",
    "integrate_numeric",
]


@dataclass(frozen=True)
class Flat:
    """``dxi``."""

    def describe(self) -> str:
        return "flat"


@dataclass(frozen=True)
class PowerWeight:
    """``alpha^-s dxi``."""

    s: float

    def __post_init__(self):
        if self.s < 0:
            raise ValueError("PowerWeight exponent must be non-negative")

    def describe(self) -> str:
        return f"alpha^-{self.s:g}"


@dataclass(frozen=True)
class Perturbed:
    """``(1 + a xi^2 / N) dxi``, meaningful to first order in ``1/N``."""

    a: float

    def describe(self) -> str:
        return f"1{self.a:+g}xi^2/N"


@dataclass(frozen=True)
class GaussianNative:
    """``dxi`` for Gaussian-family integrands (their weight is already in the integrand)."""

    def describe(self) -> str:
        return "gaussian"


MeasureSpec = Union[Flat, PowerWeight, Perturbed, GaussianNative]


# Gamma(x + 1/2) / Gamma(x) ~ sqrt(x) * sum_j c_j x^-j
_HALF_RATIO_SERIES = (1.0, -1 / 8, 1 / 128, 5 / 1024, -21 / 32768, -399 / 262144, 869 / 4194304)


def gamma_half_ratio(x: float) -> float:
    """``Gamma(x + 1/2) / Gamma(x)`` to a few ulp for ``x > 0``.

    Differences of ``gammaln`` lose about ``eps * x log x`` here, which matters
    once ``x`` reaches the thousands.  Small arguments are shifted up with the
    exact recurrence before the asymptotic series is summed.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    factor = 1.0
    while x < 200.0:
        factor *= x / (x + 0.5)
        x += 1.0
    inv, acc = 1.0 / x, 0.0
    for c in reversed(_HALF_RATIO_SERIES):
        acc = acc * inv + c
    return factor * math.sqrt(x) * acc


def alpha_moments(N: float, s: float, kmax: int) -> list[float]:
    """``[int xi^{2k} (1 + xi^2/N)^{-s/2} dxi for k = 0..kmax]``.

    The base moment is ``sqrt(N pi) Gamma(b) / Gamma(b + 1/2)`` with
    ``b = s/2 - 1/2``; higher ones follow from the exact ratio
    ``N (k + 1/2) / (b - k - 1)``.
    """
    b = 0.5 * s - 0.5
    if b - kmax <= 0:
        raise DivergentIntegral(f"xi^{2 * kmax} alpha^-{s} is not integrable (N={N})")
    out = [math.sqrt(N * math.pi) / gamma_half_ratio(b)]
    for k in range(kmax):
        out.append(out[-1] * N * (k + 0.5) / (b - k - 1.0))
    return out


def alpha_moment(N: float, s: float, k: int) -> float:
    """``int xi^{2k} (1 + xi^2/N)^{-s/2} dxi``."""
    return alpha_moments(N, s, k)[k]


def gauss_moment(k: int) -> float:
    """``int xi^k exp(-xi^2) dxi``."""
    if k % 2:
        return 0.0
    return math.exp(gammaln(k // 2 + 0.5))


def _gauss_moment_over_sqrtpi(k: int) -> Fraction:
    # Gamma(h + 1/2) / sqrt(pi) = (2h)! / (4^h h!)
    h = k // 2
    return Fraction(math.factorial(2 * h), 4**h * math.factorial(h))


def _combine(coeffs: np.ndarray, moment) -> float:
    # fsum over ascending k keeps the reduction order fixed
    return math.fsum(float(c) * moment(k) for k, c in enumerate(coeffs) if c != 0.0 and k % 2 == 0)


def _reduce(f, g, measure: MeasureSpec, N: float | None):
    """Collapse ``f * g * dmu`` to (family, polynomial, exponent, N)."""
    if isinstance(f, WeightedPoly) and isinstance(g, WeightedPoly):
        if f.N != g.N:
            raise ValueError("operands live at different N")
        N = f.N
        poly, s = f.poly * g.poly, f.s + g.s
        if isinstance(measure, PowerWeight):
            s += measure.s
        elif isinstance(measure, Perturbed):
            poly = poly * Poly([1.0, 0.0, measure.a / N])
        elif not isinstance(measure, Flat):
            raise TypeError(f"{measure!r} does not apply to power-law integrands")
        return "alpha", poly, s, N
    if isinstance(f, GaussPoly) and isinstance(g, GaussPoly):
        poly = f.poly * g.poly
        if isinstance(measure, Perturbed):
            if N is None:
                raise ValueError("Perturbed measure needs N")
            if poly.is_exact:
                poly = poly * Poly.exact([0, 0, Fraction(measure.a) / Fraction(N)]) + poly
            else:
                poly = poly * Poly([1.0, 0.0, measure.a / N])
        elif not isinstance(measure, (Flat, GaussianNative)):
            raise TypeError(f"{measure!r} does not apply to Gaussian integrands")
        return "gauss", poly, None, N
    raise TypeError("integrand factors must both be WeightedPoly or both GaussPoly")


def integrate(f, g, measure: MeasureSpec = Flat(), N: float | None = None) -> float:
    """Exact ``int f g dmu`` via the moment formulas.

    ``N`` is only needed for a :class:`Perturbed` measure on Gaussian integrands.
    """
    family, poly, s, N = _reduce(f, g, measure, N)
    if poly.is_zero():
        return 0.0
    if family == "alpha":
        # integrability is decided by the top monomial, even or odd
        if 0.5 * s - 0.5 * poly.degree - 0.5 <= 0:
            raise DivergentIntegral(f"degree {poly.degree} against alpha^-{s} diverges")
        coeffs = poly.to_float().coeffs
        moments = alpha_moments(N, s, (len(coeffs) - 1) // 2)
        return _combine(coeffs, lambda k: moments[k // 2])
    if poly.is_exact:
        # rational coefficients: the sum is exact, only the final product rounds
        total = sum((c * _gauss_moment_over_sqrtpi(k) for k, c in enumerate(poly.coeffs)
                     if k % 2 == 0), Fraction(0))
        return float(total) * math.sqrt(math.pi)
    return _combine(poly.coeffs, gauss_moment)


def integrate_numeric(f, g, measure: MeasureSpec = Flat(), N: float | None = None,
                      rtol: float = 1e-10) -> float:
    """Adaptive-quadrature value of the same integral as :func:`integrate`.

    Power-law integrands are mapped to ``theta in [0, pi/2)`` with
    ``xi = sqrt(N) tan(theta)`` (both signs of ``xi`` folded in).  The image
    behaves like ``(pi/2 - theta)^(s - 2 - deg)`` at the far end, which is
    handed to QUADPACK as an algebraic weight.  Gaussian integrands are
    integrated on ``[-L, L]`` with ``L = max(10, 8 sqrt(degree))``.
    """
    family, poly, s, N = _reduce(f, g, measure, N)
    poly = poly.to_float()
    if poly.is_zero():
        return 0.0
    deg = poly.degree
    opts = dict(epsabs=0.0, epsrel=rtol * 1e-2, limit=500)
    with warnings.catch_warnings():
        warnings.simplefilter("error", _quad.IntegrationWarning)
        try:
            if family == "alpha":
                if 0.5 * s - 0.5 * deg - 0.5 <= 0:
                    raise DivergentIntegral(f"degree {deg} against alpha^-{s} diverges")
                rN = math.sqrt(N)
                c = poly.coeffs
                # p(xi) + p(-xi) keeps the even part only
                even = [(k, 2.0 * c[k] * rN ** (k + 1)) for k in range(0, deg + 1, 2)]
                beta = s - 2.0 - deg

                def integrand(theta):
                    # xi^k cos^(s-2) = N^(k/2) sin^k cos^(deg-k) * cos^beta, and
                    # cos^beta = (pi/2 - theta)^beta * sinc^beta
                    sn, cs = math.sin(theta), math.cos(theta)
                    smooth = math.fsum(a * sn**k * cs ** (deg - k) for k, a in even)
                    return smooth * np.sinc((0.5 * math.pi - theta) / math.pi) ** beta

                total, err = _quad.quad(integrand, 0.0, 0.5 * math.pi, weight="alg",
                                        wvar=(0.0, beta), **opts)
                scale = abs(total)
            else:
                L = max(10.0, 8.0 * math.sqrt(max(deg, 1)))

                def integrand(x):
                    return poly(x) * math.exp(-x * x)

                # split at the origin: the parity cancellation is then a
                # difference of two accurately computed numbers
                left, err_l = _quad.quad(integrand, -L, 0.0, **opts)
                right, err_r = _quad.quad(integrand, 0.0, L, **opts)
                total, err, scale = left + right, err_l + err_r, abs(left) + abs(right)
        except _quad.IntegrationWarning as exc:
            raise NonConvergence(str(exc)) from exc
    if err > rtol * max(scale, 1e-300):
        raise NonConvergence(f"quadrature error {err:.3g} exceeds tolerance")
    return total
