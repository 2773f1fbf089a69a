import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import hermite as H
from scipy import integrate

from rho_lab.polyalg import (GaussPoly, Poly, WeightedPoly, gp_differentiate, gp_mul_xi,
                             hermite_expand, hermite_reconstruct, oscillator_function,
                             wp_differentiate, wp_multiply)

coeff = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
small_poly = st.lists(coeff, min_size=0, max_size=8)
xi_value = st.floats(-5, 5)
SETTINGS = settings(max_examples=200, derandomize=True, deadline=None)


def _same(a, b):
    n = max(len(a), len(b))
    return np.allclose(np.pad(a, (0, n - len(a))), np.pad(b, (0, n - len(b))), rtol=0, atol=0)


# -- Poly ----------------------------------------------------------------------

def test_trailing_zeros_trimmed():
    assert Poly([1.0, 2.0, 0.0, 0.0]).degree == 1
    assert Poly([0.0, 0.0]).is_zero()
    assert Poly([]).degree == -1
    assert len(Poly([0.0]).coeffs) == 0


def test_exact_polys_stay_rational():
    p = Poly.exact([Fraction(1, 3), 0, Fraction(-2, 7)])
    q = (p * p).deriv() + p.mul_xi(2) * 3
    assert q.is_exact
    assert all(isinstance(c, Fraction) for c in q.coeffs)
    assert q.coeffs[1] == 2 * Fraction(1, 3) * Fraction(-2, 7) * 2


def test_float_roundtrip_of_exact():
    p = Poly.exact([Fraction(1, 2), Fraction(3, 4)])
    assert np.array_equal(p.to_float().coeffs, [0.5, 0.75])


@SETTINGS
@given(small_poly, small_poly, xi_value)
def test_poly_evaluation_homomorphism(a, b, x):
    p, q = Poly(a), Poly(b)
    scale = Poly(np.abs(p.coeffs))(abs(x)) * max(Poly(np.abs(q.coeffs))(abs(x)), 1.0) + 1e-300
    assert abs((p * q)(x) - p(x) * q(x)) <= 1e-12 * scale
    assert abs((p + q)(x) - (p(x) + q(x))) <= 1e-12 * (scale + Poly(np.abs(q.coeffs))(abs(x)))
    assert abs(p.mul_xi()(x) - x * p(x)) <= 1e-12 * abs(x) * (Poly(np.abs(p.coeffs))(abs(x)) + 1e-300)


# -- WeightedPoly --------------------------------------------------------------

def test_wp_differentiate_examples():
    N = 7.0
    d = wp_differentiate(WeightedPoly(0.0, Poly([1.0]), N))
    assert d.s == 2.0 and d.poly.is_zero()
    c0 = 0.5 + 7.5
    d = wp_differentiate(WeightedPoly(c0, Poly([1.0]), N))
    assert d.s == c0 + 2
    assert _same(d.poly.coeffs, [0.0, -c0 / N])
    d = wp_differentiate(WeightedPoly(2.0, Poly([0.0, 1.0]), N))
    assert d.s == 4.0
    np.testing.assert_allclose(d.poly.coeffs, [1.0, 0.0, 1.0 / N - 2.0 / N], rtol=1e-15)


@pytest.mark.parametrize("s, coeffs", [(8.5, [1.0]), (2.0, [0.0, 1.0]), (13.0, [0.3, -1.0, 2.0])])
def test_wp_differentiate_finite_difference_at_point(s, coeffs):
    f = WeightedPoly(s, Poly(coeffs), 10.0)
    h, x = 1e-5, 0.7
    fd = (f(x + h) - f(x - h)) / (2 * h)
    assert float(f.deriv()(x)) == pytest.approx(fd, rel=1e-8)


def _fd_envelope(f, x):
    # magnitude scale of the derivative terms over a unit neighbourhood of x,
    # immune to cancellation at isolated roots
    a, N, s, P = abs(x) + 1.0, f.N, f.s, f.poly
    absP = Poly(np.abs(P.coeffs))
    env = (1 + a * a / N) ** (-s / 2 - 1) * ((1 + a * a / N) * Poly(np.abs(P.deriv().coeffs))(a)
                                             + s / N * a * absP(a))
    return max(env, float(WeightedPoly(s, absP, N)(a)))


@settings(max_examples=400, derandomize=True, deadline=None)
@given(st.floats(0, 50), st.floats(1, 100), st.lists(coeff, min_size=1, max_size=11), xi_value)
def test_wp_differentiate_matches_central_differences(s, N, coeffs, x):
    f = WeightedPoly(s, Poly(coeffs), N)
    h = 1e-5
    # five-point stencil: truncation is O(h^4), far below the tolerance
    fd = (8 * (f(x + h) - f(x - h)) - (f(x + 2 * h) - f(x - 2 * h))) / (12 * h)
    exact = float(f.deriv()(x))
    # the difference quotient itself carries roundoff of order eps |f| / h
    noise = 8 * np.finfo(float).eps * float(WeightedPoly(s, Poly(np.abs(coeffs)), N)(abs(x) + 2 * h)) / h
    assert abs(fd - exact) <= 1e-8 * max(abs(exact), _fd_envelope(f, x)) + noise


def test_wp_multiply_examples():
    N = 3.0
    f = WeightedPoly(2.5, Poly([1.0, 2.0]), N)
    one = WeightedPoly(0.0, Poly([1.0]), N)
    g = wp_multiply(f, one)
    assert g.s == f.s and _same(g.poly.coeffs, f.poly.coeffs)
    sq = wp_multiply(WeightedPoly(2.0, Poly([0.0, 1.0]), N), WeightedPoly(2.0, Poly([0.0, 1.0]), N))
    assert sq.s == 4.0 and _same(sq.poly.coeffs, [0.0, 0.0, 1.0])
    cancel = wp_multiply(WeightedPoly.alpha_power(2, N), f)
    assert cancel.s == f.s - 2


@SETTINGS
@given(st.floats(0, 20), st.floats(0, 20), st.floats(1, 50), small_poly, small_poly, xi_value)
def test_wp_evaluation_homomorphism(s1, s2, N, a, b, x):
    f, g = WeightedPoly(s1, Poly(a), N), WeightedPoly(s2, Poly(b), N)
    env = (WeightedPoly(s1, Poly(np.abs(f.poly.coeffs)), N)(abs(x))
           * WeightedPoly(s2, Poly(np.abs(g.poly.coeffs)), N)(abs(x))) + 1e-300
    assert abs((f * g)(x) - f(x) * g(x)) <= 1e-12 * env


def test_raise_weight_preserves_values():
    f = WeightedPoly(1.5, Poly([0.2, -1.0, 0.5]), 4.0)
    x = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(f.raise_weight(7.5)(x), f(x), rtol=1e-13)
    with pytest.raises(ValueError):
        f.raise_weight(2.0)


def test_sum_at_common_weight():
    N = 5.0
    f, g = WeightedPoly(1.0, Poly([1.0]), N), WeightedPoly(3.0, Poly([0.0, 2.0]), N)
    x = np.linspace(-4, 4, 9)
    np.testing.assert_allclose((f + g)(x), f(x) + g(x), rtol=1e-14)


# -- GaussPoly -----------------------------------------------------------------

def test_gp_examples():
    assert _same(gp_differentiate(GaussPoly(Poly([1.0]))).poly.coeffs, [0.0, -1.0])
    assert _same(gp_differentiate(GaussPoly(Poly([0.0, 1.0]))).poly.coeffs, [1.0, 0.0, -1.0])
    assert _same(gp_mul_xi(GaussPoly(Poly([1.0]))).poly.coeffs, [0.0, 1.0])


@SETTINGS
@given(st.lists(coeff, min_size=1, max_size=10), st.floats(-4, 4))
def test_gp_derivative_matches_finite_difference(a, x):
    f = GaussPoly(Poly(a))
    h = 1e-5
    fd = (f(x + h) - f(x - h)) / (2 * h)
    env = math.exp(-x * x / 2) * (Poly(np.abs(f.poly.deriv().coeffs))(abs(x))
                                  + abs(x) * Poly(np.abs(f.poly.coeffs))(abs(x)) + 1.0)
    assert abs(f.deriv()(x) - fd) <= 1e-8 * env


# -- oscillator basis ----------------------------------------------------------

def test_oscillator_functions_against_numpy_hermite():
    x = np.linspace(-5, 5, 41)
    for k in range(12):
        c = np.zeros(k + 1)
        c[k] = 1.0
        ref = math.pi**-0.25 * np.exp(-x**2 / 2) * H.hermval(x, c) / math.sqrt(2.0**k * math.factorial(k))
        np.testing.assert_allclose(oscillator_function(k)(x), ref, rtol=1e-12, atol=1e-14)


def test_oscillator_functions_orthonormal_by_quadrature():
    for m in range(5):
        for n in range(5):
            val, _ = integrate.quad(lambda t: oscillator_function(m)(t) * oscillator_function(n)(t),
                                    -np.inf, np.inf, epsabs=1e-13)
            assert val == pytest.approx(float(m == n), abs=1e-10)


def test_hermite_expand_examples():
    c = hermite_expand(oscillator_function(3))
    np.testing.assert_allclose(c, [0, 0, 0, 1], atol=1e-14)
    assert hermite_expand(GaussPoly(Poly([]))).size == 0
    # e^{-xi^2/2} xi = c_1 phi_1; projection computed by quadrature
    f = GaussPoly(Poly([0.0, 1.0]))
    proj, _ = integrate.quad(lambda t: f(t) * oscillator_function(1)(t), -np.inf, np.inf, epsabs=1e-14)
    c = hermite_expand(f)
    assert c[1] == pytest.approx(proj, rel=1e-12)
    assert c[1] == pytest.approx(math.pi**0.25 / math.sqrt(2), rel=1e-14)
    assert c[0] == 0.0


def test_hermite_expand_matches_projection():
    rng = np.random.default_rng(4)
    f = GaussPoly(Poly(rng.normal(size=7)))
    c = hermite_expand(f)
    for k in range(7):
        proj, _ = integrate.quad(lambda t: f(t) * oscillator_function(k)(t), -np.inf, np.inf,
                                 epsabs=1e-13)
        assert c[k] == pytest.approx(proj, abs=1e-10)


@settings(max_examples=100, derandomize=True, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=1, max_size=31))
def test_hermite_roundtrip_is_function_identity(a):
    # the monomial-to-Hermite change of basis is too ill-conditioned at degree 30
    # for coefficientwise identity in double precision; the represented function is kept
    f = GaussPoly(Poly(a))
    g = hermite_reconstruct(hermite_expand(f))
    x = np.linspace(-5, 5, 41)
    env = np.max(GaussPoly(Poly(np.abs(f.poly.coeffs)))(np.abs(x))) + 1e-300
    assert np.max(np.abs(g(x) - f(x))) <= 1e-12 * env


@settings(max_examples=100, derandomize=True, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=1, max_size=13))
def test_hermite_roundtrip_coefficients_low_degree(a):
    f = Poly(a)
    g = hermite_reconstruct(hermite_expand(GaussPoly(f))).poly
    n = max(len(f.coeffs), len(g.coeffs))
    diff = np.pad(f.coeffs, (0, n - len(f.coeffs))) - np.pad(g.coeffs, (0, n - len(g.coeffs)))
    assert np.max(np.abs(diff), initial=0.0) <= 1e-10 * max(f.max_abs(), 1e-300)


@settings(max_examples=100, derandomize=True, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=1, max_size=31))
def test_hermite_coefficients_survive_reconstruction(c):
    c = np.asarray(c)
    back = hermite_expand(hermite_reconstruct(c))
    back = np.pad(back, (0, len(c) - len(back)))
    assert np.max(np.abs(back - c)) <= 1e-9 * max(np.max(np.abs(c)), 1e-300)
