"""Standard and relativistic Hermite polynomials.

The relativistic polynomial of degree ``n`` solves

    (1 + xi^2/N) H'' - (2/N)(N_lambda + n - 1/2) xi H' + (n/N)(2 N_lambda + n) H = 0.

Substituting a power series gives the two-term recurrence

    a_{k+2} = -(k - n)(k - n - 2 N_lambda) a_k / (N (k+2)(k+1)),

which terminates at ``k = n``.  We run it downward from the leading
coefficient ``a_n = prod_{j=1..n} (2 N_lambda + j) / N``; with this scale the
differential raising operator maps ``alpha^-c_n H_n`` to exactly
``alpha^-c_{n+1} H_{n+1} / sqrt(2)``, and ``a_n -> 2^n`` as ``N -> inf``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModelParams
from .polyalg import Poly, alpha_sq

__all__ = [
    "RelHermite",
    "hermite_std",
    "relhermite",
    "relhermite_leading",
    "relhermite_ode_apply",
    "relhermite_ode_residual",
]


def hermite_std(n: int, exact: bool = False) -> Poly:
    """Physicists' Hermite polynomial, leading coefficient ``2^n``.

    ``exact=True`` keeps the integer coefficients as fractions.
    """
    prev, cur = Poly([]), (Poly.exact([1]) if exact else Poly([1.0]))
    for k in range(n):
        prev, cur = cur, cur.mul_xi() * 2 - prev * (2 * k)
    return cur


@dataclass(frozen=True, eq=False)
class RelHermite:
    n: int
    params: ModelParams
    poly: Poly

    def __call__(self, xi):
        return self.poly(xi)


def relhermite_leading(params: ModelParams, n: int) -> float:
    j = np.arange(1, n + 1)
    return float(np.prod((2.0 * params.Nlambda + j) / params.N))


def relhermite(params: ModelParams, n: int) -> RelHermite:
    N, Nl = params.N, params.Nlambda
    a = np.zeros(n + 1)
    a[n] = relhermite_leading(params, n)
    for k in range(n - 2, -1, -2):
        a[k] = -N * (k + 2) * (k + 1) * a[k + 2] / ((k - n) * (k - n - 2.0 * Nl))
    return RelHermite(n, params, Poly(a))


def relhermite_ode_apply(params: ModelParams, n: int, poly: Poly) -> Poly:
    """Left-hand side of the defining ODE applied to ``poly``."""
    N, Nl = params.N, params.Nlambda
    return (alpha_sq(N) * poly.deriv(2)
            - poly.deriv().mul_xi() * (2.0 / N * (Nl + n - 0.5))
            + poly * (n / N * (2.0 * Nl + n)))


def relhermite_ode_residual(params: ModelParams, n: int) -> float:
    """Max |residual coefficient| over max |input coefficient|."""
    h = relhermite(params, n).poly
    return relhermite_ode_apply(params, n, h).max_abs() / h.max_abs()
