import math

import mpmath as mp
import numpy as np
import pytest
from scipy import integrate as quad_mod
from scipy.special import beta

from rho_lab import ConventionMismatch, DecompositionFailure, ModelParams
from rho_lab import exact as exact_mod
from rho_lab.exact import (ALPHA2, apply_ladder, exact_state, inner_tx, inner_x, kg_residual,
                           ladder_apply_differential, ladder_coeff, norm_tx_closed, norm_x_closed,
                           u_map_factor)
from rho_lab.measures import Flat
from rho_lab.polyalg import oscillator_function

P10 = ModelParams.from_lambda(10.0, 0.0)


def test_ground_state_norm_example():
    s = exact_state(P10, 0)
    ref = (math.sqrt(P10.N) * beta(0.5, P10.Nlambda + 1.0)) ** -0.5
    assert s.norm_x == pytest.approx(ref, rel=1e-13)
    assert s.c_n == s.b_n == P10.c_n(0)


def test_norm_by_quadrature():
    s = exact_state(P10, 3)
    val, _ = quad_mod.quad(lambda x: s(x) ** 2 / (1 + x * x / P10.N), -np.inf, np.inf, epsrel=1e-12)
    assert val == pytest.approx(1.0, abs=1e-10)


def test_nonrelativistic_ground_state():
    s = exact_state(ModelParams.from_lambda(1e6, 0.0), 0)
    x = np.linspace(-4, 4, 81)
    np.testing.assert_allclose(s(x), oscillator_function(0)(x), atol=2e-6)


def test_closed_forms_at_high_precision():
    # C'_n against an mpmath evaluation of the closed-form constant (time factor dropped)
    mp.mp.dps = 30
    N, Nl = mp.mpf(10), mp.mpf(P10.Nlambda)
    for n in range(6):
        common = (mp.pi ** mp.mpf(-0.25) / mp.sqrt(2**n * mp.factorial(n))
                  * mp.sqrt(mp.gamma(2 * Nl + 1) * (2 * N) ** n / mp.gamma(2 * Nl + n + 1)))
        cx = common * mp.sqrt((Nl + n + mp.mpf(0.5)) / (Nl + mp.mpf(0.5))
                              * mp.gamma(Nl + mp.mpf(1.5)) / (mp.sqrt(N) * mp.gamma(Nl + 1)))
        ct = common * mp.sqrt(mp.gamma(Nl + mp.mpf(0.5)) / (mp.sqrt(N) * mp.gamma(Nl)))
        assert norm_x_closed(P10, n) == pytest.approx(float(cx), rel=1e-13)
        assert norm_tx_closed(P10, n) == pytest.approx(float(ct), rel=1e-13)
        assert norm_x_closed(P10, n) / norm_tx_closed(P10, n) == pytest.approx(u_map_factor(P10, n), rel=1e-13)


def test_convention_mismatch_detected(monkeypatch):
    monkeypatch.setattr(exact_mod, "norm_x_closed", lambda params, n: 1.01 * 0.5)
    with pytest.raises(ConventionMismatch):
        exact_state(P10, 1)


def test_inner_tx_examples():
    s0, s1, s2, s3 = (exact_state(P10, n) for n in range(4))
    assert inner_tx(s2, s2) == pytest.approx(1.0, abs=1e-10)
    assert inner_tx(s0, s2) == 0.0
    assert inner_tx(s1, s3) == 0.0


def test_inner_x_examples():
    s = [exact_state(P10, n) for n in range(5)]
    assert inner_x(s[4], s[4], ALPHA2) == pytest.approx(1.0, abs=1e-10)
    assert abs(inner_x(s[0], s[2], ALPHA2)) <= 1e-10
    flat02 = inner_x(s[0], s[2], Flat())
    assert abs(flat02) > 1e-3
    # O(1/N): doubling N roughly halves it
    p20 = ModelParams.from_lambda(20.0, 0.0)
    flat02_20 = inner_x(exact_state(p20, 0), exact_state(p20, 2), Flat())
    assert flat02 / flat02_20 == pytest.approx(2.0, rel=0.15)


def test_flat_overlap_by_quadrature():
    a, b = exact_state(P10, 0), exact_state(P10, 2)
    val, _ = quad_mod.quad(lambda x: a(x) * b(x), -np.inf, np.inf, epsrel=1e-12)
    assert inner_x(a, b, Flat()) == pytest.approx(val, rel=1e-9)


@pytest.mark.parametrize("N, lam, n", [(5.0, 0.0, 0), (5.0, 1.0, 4), (100.0, 0.01, 10), (1.0, 1.0, 7)])
def test_kg_residual_vanishes(N, lam, n):
    p = ModelParams.from_lambda(N, lam)
    assert kg_residual(p, n).relative <= 1e-10
    assert kg_residual(p, n, rest_mass_restored=True).relative <= 1e-10


def test_kg_wrong_energy_probe_fires():
    assert kg_residual(ModelParams.from_lambda(5.0, 0.0), 0, energy_shift=0.1).relative > 1e-3
    assert kg_residual(ModelParams.from_lambda(5.0, 0.0), 0, rest_mass_restored=True,
                       energy_shift=0.1).relative > 1e-3


def test_ladder_coeff_examples():
    assert ladder_coeff(P10, "Z", 0) == (0.0, -1)
    amp, tgt = ladder_coeff(P10, "Z", 1)
    assert tgt == 0
    assert amp == pytest.approx(math.sqrt((2 * P10.Nlambda + 1) / 20.0), rel=1e-15)
    assert amp == pytest.approx(1.025304, abs=5e-7)
    big = ModelParams.from_lambda(1e9, 0.0)
    for n in range(1, 6):
        assert ladder_coeff(big, "Z", n)[0] == pytest.approx(math.sqrt(n), rel=1e-8)
        assert ladder_coeff(big, "Zdag", n)[0] == pytest.approx(math.sqrt(n + 1), rel=1e-8)
        assert ladder_coeff(big, "Zp", n)[0] == pytest.approx(math.sqrt(n), rel=1e-8)
    with pytest.raises(ValueError):
        ladder_coeff(P10, "Y", 1)


def test_ladder_differential_examples():
    act = ladder_apply_differential(P10, "Zdag", 0)
    assert act.target == 1
    assert act.amplitude == pytest.approx(math.sqrt((2 * P10.Nlambda + 1) / 20.0), abs=1e-9)
    assert ladder_apply_differential(P10, "Z", 0).amplitude == 0.0


@pytest.mark.parametrize("n", range(11))
def test_ladder_differential_matches_coefficients(n):
    for kind in ("Z", "Zdag"):
        amp, tgt = ladder_coeff(P10, kind, n)
        act = ladder_apply_differential(P10, kind, n)
        assert act.amplitude == pytest.approx(amp, abs=1e-9)
        assert act.target == tgt


def test_number_operator_composition():
    n = 2
    s = exact_state(P10, n)
    e1 = exact_state(P10, n - 1).energy_rest_subtracted
    down = apply_ladder(s.wp, "Z", s.energy_rest_subtracted)
    back = apply_ladder(down, "Zdag", e1)
    eig = n * (2 * P10.Nlambda + n) / (2 * P10.N)
    x = np.linspace(-5, 5, 101)
    assert np.max(np.abs(back(x) - eig * s.wp(x))) <= 1e-9 * np.max(np.abs(s.wp(x)))


def test_decomposition_failure_on_wrong_energy(monkeypatch):
    # with the full energy inside the operator the image leaves the state family
    real = exact_mod.apply_ladder
    monkeypatch.setattr(exact_mod, "apply_ladder",
                        lambda f, kind, energy: real(f, kind, energy + P10.N))
    with pytest.raises(DecompositionFailure):
        ladder_apply_differential(P10, "Zdag", 1)


def test_u_map_factor_values():
    mp.mp.dps = 30
    Nl = mp.sqrt(1 + 4 * mp.mpf(10) ** 2) / 2
    ref = mp.sqrt((mp.mpf(1.5) + Nl) / Nl)
    assert u_map_factor(P10, 1) == pytest.approx(float(ref), rel=1e-14)
    assert u_map_factor(P10, 1) == pytest.approx(1.0722933, abs=1e-7)
    assert 1.075 - u_map_factor(P10, 1) == pytest.approx(2.7e-3, abs=1e-4)
    assert u_map_factor(ModelParams.from_lambda(1e12, 0.0), 3) == pytest.approx(1.0, abs=1e-11)
