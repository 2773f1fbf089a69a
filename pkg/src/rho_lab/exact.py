"""Exact eigenstates of the covariant and minimal representations.

A state of level ``n`` is ``alpha^-c_n H_n^{(N,lambda)}(xi)`` with
``c_n = 1/2 + N_lambda + n``.  Two normalizations are carried:

* ``norm_tx`` -- the constant for the ``dx dt`` product, with the one-period
  time average absorbed (``omega/2pi`` times the period is 1);
* ``norm_x`` -- the constant for the x-only product with measure ``alpha^-2 dxi``.

Both are closed forms converted to ``xi`` units (``(m omega/hbar pi)^{1/4}``
becomes ``pi^{-1/4}``).  ``norm_x`` is also computed numerically and the two
must agree.

Inside differential operators ``i hbar d/dt`` is replaced by the
rest-subtracted energy ``(c_n - N) hbar omega``, the operators acting on the
field with the rest mass removed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ConventionMismatch, DecompositionFailure, NumericalFailure
from .measures import Flat, MeasureSpec, PowerWeight, gamma_half_ratio, integrate
from .model import ModelParams, energy_exact
from .polyalg import WeightedPoly
from .relhermite import relhermite

__all__ = [
    "ExactState",
    "exact_state",
    "norm_tx_closed",
    "norm_x_closed",
    "inner_tx",
    "inner_x",
    "KGResidual",
    "kg_residual",
    "LADDER_KINDS",
    "ladder_coeff",
    "apply_ladder",
    "LadderAction",
    "ladder_apply_differential",
    "u_map_factor",
]

ALPHA2 = PowerWeight(2.0)
NORM_RTOL = 1e-9


def _log_common(params: ModelParams, n: int) -> float:
    # log of pi^{-1/4} / (2^{n/2} sqrt(n!)) * sqrt((2N)^n / prod_{j<=n}(2Nl+j))
    Nl, N = params.Nlambda, params.N
    return (-0.25 * math.log(math.pi)
            - 0.5 * n * math.log(2.0) - 0.5 * gammaln(n + 1.0)
            + 0.5 * (n * math.log(2.0 * N) - math.fsum(math.log(2 * Nl + j) for j in range(1, n + 1))))


def norm_tx_closed(params: ModelParams, n: int) -> float:
    """Covariant constant ``C_n`` in xi units, time factor removed."""
    Nl, N = params.Nlambda, params.N
    tail = 0.5 * math.log(gamma_half_ratio(Nl) / math.sqrt(N))
    return math.exp(_log_common(params, n) + tail)


def norm_x_closed(params: ModelParams, n: int) -> float:
    """Minimal-representation constant ``C'_n`` in xi units, time factor removed."""
    Nl, N = params.Nlambda, params.N
    tail = 0.5 * (math.log((Nl + n + 0.5) / (Nl + 0.5))
                  + math.log(gamma_half_ratio(Nl + 1.0) / math.sqrt(N)))
    return math.exp(_log_common(params, n) + tail)


@dataclass(frozen=True, eq=False)
class ExactState:
    n: int
    params: ModelParams
    c_n: float
    b_n: float
    wp: WeightedPoly
    norm_x: float
    norm_tx: float

    @property
    def energy_rest_subtracted(self) -> float:
        return energy_exact(self.params, self.n).rest_subtracted

    def minimal(self) -> WeightedPoly:
        """``Psi'_n`` as a WeightedPoly."""
        return self.wp.scale(self.norm_x)

    def __call__(self, xi):
        return self.norm_x * self.wp(xi)


def exact_state(params: ModelParams, n: int, check: bool = True) -> ExactState:
    c = params.c_n(n)
    wp = WeightedPoly(c, relhermite(params, n).poly, params.N)
    gram = integrate(wp, wp, ALPHA2)
    if not (math.isfinite(gram) and gram > 0):
        # cancellation in the moment sum has eaten every digit
        raise NumericalFailure(f"level {n} at {params}: squared norm evaluated to {gram!r}")
    norm_x = gram ** -0.5
    if check:
        closed = norm_x_closed(params, n)
        if abs(closed - norm_x) > NORM_RTOL * norm_x:
            raise ConventionMismatch(
                f"C'_{n}: closed form {closed!r} vs numerical {norm_x!r} at {params}")
    return ExactState(n=n, params=params, c_n=c, b_n=c, wp=wp,
                      norm_x=norm_x, norm_tx=norm_tx_closed(params, n))


def inner_tx(a: ExactState, b: ExactState) -> float:
    """``<Psi_n|Psi_m>`` for the ``dx dt`` product.

    The time integral over one period kills every pair with different
    frequencies exactly; the spatial part uses the flat measure, the weight
    ``alpha^-(1+2N_lambda+n+m)`` being carried by the states themselves.
    """
    if a.n != b.n:
        return 0.0
    return a.norm_tx * b.norm_tx * integrate(a.wp, b.wp, Flat())


def inner_x(a: ExactState, b: ExactState, measure: MeasureSpec = ALPHA2) -> float:
    return a.norm_x * b.norm_x * integrate(a.wp, b.wp, measure)


# -- Klein-Gordon certificate -------------------------------------------------

@dataclass(frozen=True, eq=False)
class KGResidual:
    residual: WeightedPoly
    scale: float

    @property
    def relative(self) -> float:
        return self.residual.poly.max_abs() / self.scale


def _sum_terms(terms) -> KGResidual:
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    s = total.s
    scale = max(t.raise_weight(s).poly.max_abs() for t in terms)
    return KGResidual(total, scale)


def kg_residual(params: ModelParams, n: int, rest_mass_restored: bool = False,
                energy_shift: float = 0.0) -> KGResidual:
    """Apply the Klein-Gordon-like operator to level ``n``.

    Time dependence ``exp(-i eps omega t)`` turns ``d/dt`` into
    multiplication.  Without the flag ``eps = b_n - N`` and the operator is the
    rest-subtracted six-term form (divided by ``omega^2``); with it
    ``eps = b_n`` and the operator is ``box + m^2c^2/hbar^2 + chi R`` (scaled by
    ``hbar/(m omega)`` and then by ``N`` so both residuals share units).
    ``energy_shift`` perturbs ``b_n`` and exists to check that the detector
    fires.
    """
    N, lam = params.N, params.lam
    b = params.c_n(n) + energy_shift
    F = WeightedPoly(params.c_n(n), relhermite(params, n).poly, N)
    dF = F.deriv()
    a2F2 = WeightedPoly.alpha_power(2, N) * dF.deriv()
    F_over_a2 = WeightedPoly.alpha_power(-2, N) * F

    if not rest_mass_restored:
        eps = b - N
        terms = [
            F_over_a2 * (-eps * eps),            # alpha^-2 d_t^2
            F_over_a2 * (-2.0 * N * eps),        # -(2 i m c^2 / hbar alpha^2) d_t
            dF.mul_xi() * -2.0,                  # -2 omega^2 x d_x
            a2F2 * -N,                           # -c^2 alpha^2 d_x^2
            F_over_a2 * (-N * N),                # -m^2 c^4 / hbar^2 alpha^2
            F * (-lam * N),                      # -lambda m c^2 omega / hbar
            F * (N * N),                         # +m^2 c^4 / hbar^2
        ]
        return _sum_terms(terms)

    R = params.curvature
    terms = [
        F_over_a2 * (-b * b / N),                # alpha^-2 c^-2 d_t^2
        dF.mul_xi() * (-2.0 / N),                # -2 omega^2 x / c^2 d_x
        a2F2 * -1.0,                             # -alpha^2 d_x^2
        F * N,                                   # m^2 c^2 / hbar^2
        F * (params.chi * R),                    # chi R
    ]
    res = _sum_terms(terms)
    return KGResidual(res.residual.scale(N), res.scale * N)


# -- ladder operators ---------------------------------------------------------

LADDER_KINDS = ("Z", "Zdag", "Zp", "Zpdag")


def ladder_coeff(params: ModelParams, kind: str, n: int) -> tuple[float, int]:
    """Amplitude and target level of a ladder operator on level ``n``."""
    N, Nl = params.N, params.Nlambda
    if kind in ("Z", "Zp"):
        if n == 0:
            return 0.0, -1
        amp = math.sqrt(n * (2 * Nl + n) / (2 * N))
        if kind == "Zp":
            amp *= math.sqrt((Nl + n - 0.5) / (Nl + n + 0.5))
        return amp, n - 1
    if kind in ("Zdag", "Zpdag"):
        amp = math.sqrt((n + 1) * (2 * Nl + n + 1) / (2 * N))
        if kind == "Zpdag":
            amp *= math.sqrt((Nl + n + 1.5) / (Nl + n + 0.5))
        return amp, n + 1
    raise ValueError(f"unknown ladder kind {kind!r}")


def apply_ladder(f: WeightedPoly, kind: str, energy: float) -> WeightedPoly:
    """Differential annihilation/creation operator on ``f`` (time factor stripped).

    ``energy`` is the rest-subtracted eigenvalue of ``i hbar d/dt`` on the
    field ``f`` came from, in units of hbar omega.  In xi units

        Z    = (1/sqrt 2) [ alpha d/dxi + (1 + energy/N) xi / alpha]
        Zdag = (1/sqrt 2) [-alpha d/dxi + (1 + energy/N) xi / alpha].
    """
    if kind not in ("Z", "Zdag"):
        raise ValueError("differential form exists for Z and Zdag only")
    N = f.N
    alpha = WeightedPoly.alpha_power(1, N)
    inv_alpha = WeightedPoly.alpha_power(-1, N)
    sign = 1.0 if kind == "Z" else -1.0
    out = alpha * f.deriv() * sign + inv_alpha * f.mul_xi() * (1.0 + energy / N)
    return out.scale(1.0 / math.sqrt(2.0))


@dataclass(frozen=True)
class LadderAction:
    amplitude: float
    target: int
    leakage: float


def _project_single(result: WeightedPoly, target: WeightedPoly) -> tuple[float, float]:
    """Best ``k`` with ``result ~ k * target`` and the relative leftover."""
    s = max(result.s, target.s)
    try:
        r, t = result.raise_weight(s), target.raise_weight(s)
    except ValueError as exc:
        raise DecompositionFailure(str(exc)) from exc
    n = max(len(r.poly.coeffs), len(t.poly.coeffs))
    rv = np.pad(r.poly.coeffs, (0, n - len(r.poly.coeffs)))
    tv = np.pad(t.poly.coeffs, (0, n - len(t.poly.coeffs)))
    k = float(rv @ tv / (tv @ tv))
    leak = float(np.max(np.abs(rv - k * tv)) / max(np.max(np.abs(rv)), 1e-300))
    return k, leak


def ladder_apply_differential(params: ModelParams, kind: str, n: int,
                              tol: float = 1e-8) -> LadderAction:
    """Apply ``Z`` or ``Zdag`` in differential form to ``Psi_n`` and read off the amplitude.

    The image must be a single exact state; the returned amplitude is relative
    to the covariant normalization ``C_n``.
    """
    src = exact_state(params, n, check=False)
    img = apply_ladder(src.wp, kind, src.energy_rest_subtracted)
    target = n - 1 if kind == "Z" else n + 1
    if target < 0:
        leak = img.poly.max_abs() / src.wp.poly.max_abs()
        if leak > 1e-12:
            raise DecompositionFailure(f"Z on the ground state left {leak:.3g}")
        return LadderAction(0.0, -1, leak)
    tgt = exact_state(params, target, check=False)
    k, leak = _project_single(img, tgt.wp)
    if leak > tol:
        raise DecompositionFailure(f"{kind} on level {n}: leakage {leak:.3g} off level {target}")
    return LadderAction(k * src.norm_tx / tgt.norm_tx, target, leak)


def u_map_factor(params: ModelParams, n: int) -> float:
    """Amplitude ``sqrt(E_n / (hbar omega N_lambda))`` of the covariant-to-minimal map.

    Its phase rotates at the rest-subtracted frequency
    ``energy_exact(params, n).rest_subtracted``.
    """
    return math.sqrt(params.c_n(n) / params.Nlambda)
