"""Special-function contracts: values, recurrences, symmetry, oracles."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from utmcont import specfun as sf


def test_gamma_small_integers():
    assert sf.gamma(1) == pytest.approx(1.0, rel=1e-15)
    assert sf.gamma(5) == pytest.approx(24.0, rel=1e-15)
    assert sf.gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)


@pytest.mark.parametrize("s", [0, -1, -2, -7])
def test_gamma_pole_error(s):
    with pytest.raises(sf.GammaPoleError):
        sf.gamma(s)
    with pytest.raises(sf.GammaPoleError):
        sf.log_gamma(s)


@pytest.mark.parametrize("s", [3.5, 20.0, 140.5, -2.5])
def test_gamma_recurrence_accuracy(s):
    # Gamma(s+1) = s*Gamma(s) probes the claimed 1e-13 relative accuracy
    assert sf.gamma(s + 1) == pytest.approx(s * sf.gamma(s), rel=1e-13)


def test_log_gamma_consistent_with_gamma():
    for s in (3.5, 20.0, 170.0):
        lg, sign = sf.log_gamma(s)
        assert sign * math.exp(lg) == pytest.approx(sf.gamma(s), rel=1e-12)


def test_log_gamma_large_argument():
    lg, sign = sf.log_gamma(500.0)
    # Stirling check
    stirling = 0.5 * math.log(2 * math.pi / 500) + 500 * (math.log(500) - 1)
    assert sign == 1.0
    assert lg == pytest.approx(stirling, rel=1e-6)


def test_lower_gamma_exponential_identity():
    # gamma(1, y) = 1 - e^-y
    for y in (0.3, 1.0, 5.0):
        assert sf.lower_incomplete_gamma(1.0, y) == pytest.approx(
            1 - math.exp(-y), rel=1e-14
        )


def test_lower_gamma_empty_integral():
    for s in (0.5, 2.0, 31.0):
        assert sf.lower_incomplete_gamma(s, 0.0) == 0.0


def test_lower_gamma_quadrature_oracle():
    # frozen 35-digit tanh-sinh quadrature of the defining integral on (0, 3)
    oracle = 0.922271212307834
    assert sf.lower_incomplete_gamma(2.5, 3.0) == pytest.approx(oracle, abs=1e-12)
    # adaptive scipy quadrature agrees within its own error estimate
    val, err = quad(lambda u: u**1.5 * math.exp(-u), 0.0, 3.0, epsabs=1e-13)
    assert abs(val - oracle) <= max(err, 1e-10)


def test_lower_gamma_saturates_to_gamma():
    for s in (0.5, 2.5, 10.0):
        assert sf.lower_incomplete_gamma(s, 500.0) == pytest.approx(
            sf.gamma(s), rel=1e-12
        )


@pytest.mark.parametrize("s", [0.5, 1.0, 2.5, 10.0])
@pytest.mark.parametrize("y", [0.1, 1.0, 10.0])
def test_lower_gamma_recurrence(s, y):
    # gamma(s+1, y) = s*gamma(s, y) - y^s e^-y
    lhs = sf.lower_incomplete_gamma(s + 1, y)
    rhs = s * sf.lower_incomplete_gamma(s, y) - y**s * math.exp(-y)
    assert lhs == pytest.approx(rhs, rel=1e-11, abs=1e-300)


def test_lower_gamma_monotone_and_bounded():
    ys = np.linspace(0.0, 12.0, 60)
    vals = [sf.lower_incomplete_gamma(2.5, y) for y in ys]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[-1] <= sf.gamma(2.5)


def test_lower_gamma_domain_errors():
    with pytest.raises(sf.SpecfunDomainError):
        sf.lower_incomplete_gamma(-1.0, 1.0)
    with pytest.raises(sf.SpecfunDomainError):
        sf.lower_incomplete_gamma(1.0, -0.5)
    with pytest.raises(sf.SpecfunDomainError):
        sf.regularized_lower_gamma(0.0, 1.0)


def test_bessel_scaled_at_zero():
    assert sf.bessel_i_scaled(0, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert sf.bessel_i_scaled(3, 0.0) == 0.0


def test_bessel_order_symmetry_exact():
    for a in (0.1, 1.0, 10.0, 1000.0):
        for n in range(-20, 21):
            assert sf.bessel_i_scaled(-n, a) == sf.bessel_i_scaled(n, a)


def _bessel_series_oracle(n, a, terms=60):
    # direct summation of the defining series, then scaled
    total = 0.0
    for el in range(terms):
        total += (a / 2.0) ** (2 * el + n) / (
            math.factorial(el) * math.gamma(el + n + 1)
        )
    return math.exp(-a) * total


def test_bessel_series_oracle():
    assert sf.bessel_i_scaled(2, 1.5) == pytest.approx(
        _bessel_series_oracle(2, 1.5), rel=1e-13
    )
    assert sf.bessel_i_scaled(5, 7.0) == pytest.approx(
        _bessel_series_oracle(5, 7.0), rel=1e-12
    )


@pytest.mark.parametrize("a", [0.1, 1.0, 10.0, 1e3, 1e5])
def test_bessel_recurrence_scaled(a):
    # I_n(a) = (2(n+1)/a) I_{n+1}(a) + I_{n+2}(a), scaled by e^-a.  The
    # residual is measured against the recurrence scale: stepping downward in
    # |order| subtracts near-equal large terms, so a residual relative to the
    # (tiny) left side is not achievable in fixed precision.
    for n in range(-20, 21):
        t1 = 2 * (n + 1) / a * sf.bessel_i_scaled(n + 1, a)
        t2 = sf.bessel_i_scaled(n + 2, a)
        lhs = sf.bessel_i_scaled(n, a)
        scale = max(abs(lhs), abs(t1), abs(t2))
        assert abs(lhs - (t1 + t2)) <= 1e-10 * scale


def test_bessel_scaled_bounded_by_one():
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(-40, 41))
        a = float(rng.uniform(0, 1e6))
        assert sf.bessel_i_scaled(n, a) <= 1 + 1e-12


def test_bessel_large_argument():
    # for large a, e^-a I_0(a) ~ 1/sqrt(2 pi a)
    a = 1e6
    assert sf.bessel_i_scaled(0, a) == pytest.approx(
        1 / math.sqrt(2 * math.pi * a), rel=1e-3
    )


def test_bessel_negative_argument_rejected():
    with pytest.raises(sf.SpecfunDomainError):
        sf.bessel_i_scaled(1, -0.5)


def test_reflection_product_dirichlet_values():
    assert sf.reflection_product_dirichlet(5, 0) == 1.0
    assert sf.reflection_product_dirichlet(3, 2) == 72.0  # (3*3)*(2*4)
    assert sf.reflection_product_dirichlet(4, 5) == 0.0  # (nu - nu) factor


def test_reflection_product_dirichlet_matches_gamma_quotient():
    for nu in (1, 2, 6, 11):
        for p in range(0, nu + 1):
            expected = nu * sf.gamma(p + nu) / sf.gamma(1 + nu - p) if p <= nu else 0.0
            assert sf.reflection_product_dirichlet(nu, p) == pytest.approx(
                expected, rel=1e-12
            )


def test_reflection_product_neumann_matches_gamma_quotient():
    for n in (2, 3, 8):
        for p in range(0, n - 1):
            expected = sf.gamma(p + n) / sf.gamma(n - p)
            assert sf.reflection_product_neumann(n, p) == pytest.approx(
                expected, rel=1e-12
            )
    assert sf.reflection_product_neumann(4, 0) == 1.0


def test_gamma_ratio_first_term_recovers_boundary_weight():
    # p = 0 term of the continuation sum: -2n * ratio * f0(T) = 2 f0(T)
    for n in (-1, -4, -9):
        assert -2 * n * sf.gamma_ratio(0, n) == pytest.approx(2.0, rel=1e-14)


def test_gamma_ratio_against_gamma_quotient():
    for n in (-2, -5, -8):
        for p in range(0, -n + 1):
            direct = sf.gamma(p - n) / (sf.gamma(1 - n - p) * math.factorial(2 * p))
            assert sf.gamma_ratio(p, n) == pytest.approx(direct, rel=1e-12)


def test_gamma_ratio_range_errors():
    with pytest.raises(sf.IndexRangeError):
        sf.gamma_ratio(3, -2)
    with pytest.raises(sf.IndexRangeError):
        sf.gamma_ratio(0, 1)
