import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coopsense import specfun as sf
from coopsense.errors import DomainError

mp.mp.dps = 40


def mp_marcum(m, a, b):
    # Q_M(a, b) = 1 - CDF of noncentral chi-square(2M, a^2) at b^2, by direct integration
    a, b = mp.mpf(a), mp.mpf(b)
    if a == 0:
        return mp.gammainc(m, b ** 2 / 2, mp.inf, regularized=True)
    f = lambda x: x * (x / a) ** (m - 1) * mp.exp(-(x ** 2 + a ** 2) / 2) * mp.besseli(m - 1, a * x)
    return mp.quad(f, [b, b + 10, b + 40, mp.inf])


# -- frozen oracle values (40-digit arithmetic) --

def test_upper_gamma_oracle():
    assert sf.regularized_upper_gamma(3, 2.5) == pytest.approx(0.5438131158833295179981, rel=1e-14)


def test_inverse_upper_gamma_oracle():
    assert sf.inverse_regularized_upper_gamma(3, 0.1) == pytest.approx(5.322320337834209824066, rel=1e-13)


def test_marcum_oracle():
    assert sf.marcum_q(3, 1.5, 2.0) == pytest.approx(0.8306516780080777787576, rel=1e-13)


@pytest.mark.parametrize("nu,x,want", [
    (0, 1.0, 0.2359143585071786486894),
    (2, 5.0, 2.862521684702105699251),
    (0.5, 30.0, 27.38046277596424957051),
    (3, 200.0, 196.4099732253146978367),
])
def test_log_bessel_oracles(nu, x, want):
    assert sf.log_bessel_i(nu, x) == pytest.approx(want, rel=1e-13)


def test_kummer_oracle():
    assert sf.kummer_1f1(3, 2, 0.8) == pytest.approx(3.115757299889454944404, rel=1e-13)


def test_laguerre_oracle():
    assert sf.laguerre(4, 1.5) == pytest.approx(-0.2890625, abs=1e-15)


def test_gauss_hermite_5_nodes():
    rule = sf.gauss_hermite(5)
    want = [-2.020182870456085632929, -0.9585724646138185071128, 0.0,
            0.9585724646138185071128, 2.020182870456085632929]
    np.testing.assert_allclose(rule.nodes, want, rtol=0, atol=1e-14)


# -- trivial values --

def test_trivial_gamma():
    assert sf.regularized_upper_gamma(1, 0) == 1.0
    assert sf.regularized_upper_gamma(1, 1) == pytest.approx(math.exp(-1), rel=1e-15)
    assert sf.inverse_regularized_upper_gamma(1, 1.0) == 0.0
    assert sf.inverse_regularized_upper_gamma(1, math.exp(-1)) == pytest.approx(1.0, rel=1e-14)


def test_trivial_marcum():
    assert sf.marcum_q(2, 1.3, 0.0) == 1.0
    assert sf.marcum_q(1, 0.0, 2.0) == pytest.approx(math.exp(-2), rel=1e-14)


def test_trivial_bessel_laguerre_kummer():
    assert sf.log_bessel_i(0, 0) == 0.0
    assert sf.log_bessel_i(1, 0) == -math.inf
    assert sf.laguerre(0, 7.3) == 1.0
    assert sf.laguerre(1, 2.0) == -1.0
    assert sf.kummer_1f1(2, 3, 0.0) == 1.0
    assert sf.kummer_1f1(1, 1, 1.5) == pytest.approx(math.exp(1.5), rel=1e-14)


def test_trivial_gauss_hermite():
    r1 = sf.gauss_hermite(1)
    assert r1.nodes.tolist() == [0.0]
    assert r1.weights[0] == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    r2 = sf.gauss_hermite(2)
    np.testing.assert_allclose(r2.nodes, [-1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-15)
    np.testing.assert_allclose(r2.weights, [math.sqrt(math.pi) / 2] * 2, rtol=1e-14)


# -- domain errors --

@pytest.mark.parametrize("call", [
    lambda: sf.regularized_upper_gamma(0, 1.0),
    lambda: sf.regularized_upper_gamma(1, -1.0),
    lambda: sf.inverse_regularized_upper_gamma(2, 0.0),
    lambda: sf.inverse_regularized_upper_gamma(2, 1.5),
    lambda: sf.marcum_q(0, 1.0, 1.0),
    lambda: sf.marcum_q(1, -1.0, 1.0),
    lambda: sf.log_bessel_i(-1, 1.0),
    lambda: sf.laguerre(-1, 1.0),
    lambda: sf.kummer_1f1(1, 0, 1.0),
    lambda: sf.kummer_1f1(1, -2, 1.0),
    lambda: sf.gauss_hermite(0),
    lambda: sf.gauss_hermite(65),
])
def test_domain_errors(call):
    with pytest.raises(DomainError):
        call()


# -- independent oracles on grids --

@pytest.mark.parametrize("s", [0.5, 1, 2, 5, 12, 40])
@pytest.mark.parametrize("x", [0.01, 0.7, 3.0, 11.0, 45.0])
def test_upper_gamma_vs_mpmath(s, x):
    want = float(mp.gammainc(s, x, mp.inf, regularized=True))
    assert sf.regularized_upper_gamma(s, x) == pytest.approx(want, rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("s", [1, 3, 10, 25])
@pytest.mark.parametrize("p", [1e-6, 0.01, 0.37, 0.9, 0.999999])
def test_inverse_roundtrip(s, p):
    x = sf.inverse_regularized_upper_gamma(s, p)
    assert sf.regularized_upper_gamma(s, x) == pytest.approx(p, rel=1e-11)


@pytest.mark.parametrize("m", [1, 2, 5, 10])
@pytest.mark.parametrize("a,b", [(0.5, 0.5), (1.0, 3.0), (3.0, 1.0), (4.0, 6.0), (8.0, 7.5)])
def test_marcum_vs_integration(m, a, b):
    want = float(mp_marcum(m, a, b))
    assert sf.marcum_q(m, a, b) == pytest.approx(want, rel=1e-9, abs=1e-15)


@pytest.mark.parametrize("nu", [0, 0.5, 1, 4, 10.5])
@pytest.mark.parametrize("x", [1e-3, 0.5, 7.0, 60.0, 900.0])
def test_log_bessel_vs_mpmath(nu, x):
    want = float(mp.log(mp.besseli(nu, x)))
    assert sf.log_bessel_i(nu, x) == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_log_bessel_huge_argument():
    # far past double overflow of I_nu itself
    want = float(mp.log(mp.besseli(2, 5000)))
    assert sf.log_bessel_i(2, 5000.0) == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("a", [1, 2, 3.5, 6])
@pytest.mark.parametrize("b", [1, 2, 4.5])
@pytest.mark.parametrize("x", [-8.0, -0.3, 0.2, 5.0, 40.0])
def test_kummer_vs_mpmath(a, b, x):
    want = float(mp.hyp1f1(a, b, x))
    assert sf.kummer_1f1(a, b, x) == pytest.approx(want, rel=1e-10)


def test_log_kummer_large_argument():
    log_f, sign = sf.log_kummer_1f1(5, 2, 2000.0)
    assert sign == 1.0
    assert log_f == pytest.approx(float(mp.log(mp.hyp1f1(5, 2, 2000))), rel=1e-12)


@pytest.mark.parametrize("k", [2, 5, 12, 30])
@pytest.mark.parametrize("x", [-20.0, -1.0, 0.5, 3.0])
def test_laguerre_vs_mpmath(k, x):
    assert sf.laguerre(k, x) == pytest.approx(float(mp.laguerre(k, 0, x)), rel=1e-10, abs=1e-12)


def test_log_laguerre_sequence_no_overflow():
    logs, signs = sf.log_laguerre_sequence(400, -900.0)
    assert np.all(np.isfinite(logs)) and np.all(signs == 1.0)
    assert logs[400] == pytest.approx(float(mp.log(mp.laguerre(400, 0, -900))), rel=1e-10)


@pytest.mark.parametrize("order", [1, 2, 3, 5, 10, 20, 31, 50, 64])
def test_gauss_hermite_exact_monomials(order):
    rule = sf.gauss_hermite(order)
    for k in range(2 * order):
        want = 0.0 if k % 2 else math.gamma((k + 1) / 2)
        # vectorized pow is not sign-symmetric to the last bit; build x^k from |x|^k
        got = rule.integrate(lambda x: np.copysign(np.abs(x) ** k, x) if k % 2 else np.abs(x) ** k)
        assert abs(got - want) <= 1e-10 * max(1.0, abs(want))


@pytest.mark.parametrize("order", [3, 8, 31, 64])
def test_gauss_hermite_vs_numpy(order):
    x, w = np.polynomial.hermite.hermgauss(order)
    rule = sf.gauss_hermite(order)
    np.testing.assert_allclose(rule.nodes, x, rtol=1e-12, atol=1e-13)
    np.testing.assert_allclose(rule.weights, w, rtol=1e-10, atol=1e-300)


def test_quadrature_rule_read_only():
    rule = sf.gauss_hermite(5)
    with pytest.raises(ValueError):
        rule.nodes[0] = 1.0


# -- properties --

@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.floats(0, 6), st.floats(0, 6), st.floats(0.01, 2))
def test_marcum_monotone(m, a, b, db):
    q = sf.marcum_q(m, a, b)
    assert 0.0 <= q <= 1.0
    assert sf.marcum_q(m, a, b + db) <= q + 1e-14
    assert sf.marcum_q(m, a + db, b) >= q - 1e-14
    assert sf.marcum_q(m + 1, a, b) >= q - 1e-14


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 50), st.floats(0, 100), st.floats(0.01, 5))
def test_upper_gamma_decreasing(s, x, dx):
    q = sf.regularized_upper_gamma(s, x)
    assert 0.0 <= q <= 1.0
    assert sf.regularized_upper_gamma(s, x + dx) <= q


@settings(max_examples=60, deadline=None)
@given(st.floats(0.2, 30), st.floats(1e-8, 1.0))
def test_inverse_is_inverse(s, p):
    x = sf.inverse_regularized_upper_gamma(s, p)
    assert x >= 0
    assert sf.regularized_upper_gamma(s, x) == pytest.approx(p, rel=1e-8, abs=1e-300)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.5, 10), st.floats(1, 10), st.floats(-30, 30))
def test_kummer_transformation(a, b, x):
    # Kummer's identity 1F1(a; b; x) = e^x 1F1(b - a; b; -x)
    lhs = sf.log_kummer_1f1(a, b, x)
    rhs_log, rhs_sign = sf.log_kummer_1f1(b - a, b, -x)
    if lhs[1] != 0 and rhs_sign != 0:
        assert lhs[1] == rhs_sign
        assert lhs[0] == pytest.approx(rhs_log + x, abs=1e-9 * max(1.0, abs(lhs[0])))


def test_marcum_broadcasts():
    out = sf.marcum_q(2, np.array([0.0, 1.0, 2.0]), 1.5)
    assert out.shape == (3,)
    assert np.all(np.diff(out) > 0)


def test_marcum_huge_noncentrality_saturates():
    assert sf.marcum_q(3, 5000.0, 10.0) == 1.0


def mp_marcum_complement(m, a, b):
    a2, b2 = mp.mpf(a) ** 2 / 2, mp.mpf(b) ** 2 / 2
    return mp.fsum(mp.exp(-a2) * a2 ** k / mp.factorial(k) * mp.gammainc(m + k, 0, b2, regularized=True)
                   for k in range(0, int(a2 + 20 * mp.sqrt(a2) + 200)))


@pytest.mark.parametrize("m,a,b", [(10, 12.0, 3.0), (5, 9.0, 2.0), (1, 7.0, 1.0), (3, 1.5, 2.0),
                                   (2, 30.0, 5.0), (4, 0.0, 1e-3), (6, 20.0, 15.0)])
def test_marcum_complement_relative_accuracy(m, a, b):
    want = float(mp_marcum_complement(m, a, b))
    assert sf.marcum_q_complement(m, a, b) == pytest.approx(want, rel=1e-10)
    assert sf.marcum_q(m, a, b) == pytest.approx(1.0 - want, rel=1e-15, abs=1e-16)
