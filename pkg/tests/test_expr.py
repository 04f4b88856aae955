"""Parser, exact differentiation, and evaluation of data expressions."""

import math

import numpy as np
import pytest

from utmcont.expr import (
    DerivativeCache,
    DerivativeOrderError,
    ExprDomainError,
    ExprSyntaxError,
    parse,
)

CORPUS = [
    ("t*exp(-t)", 0.7),
    ("sin(4*pi*t)", 0.33),
    ("3*x*exp(-x)", 1.2),
    ("exp(-(x-1)^2/(4*1+1))/sqrt(4*1+1)", 0.4),
    ("1/(1+t)", 0.5),
    ("exp(-x)*cos(3*pi*x)", 0.8),
    ("exp(-x^2)", 0.6),
    ("cosh(x)-sinh(x)", 0.9),
    ("2*exp(-sqrt(3)*x)*cos(x+8*0.5)", 0.25),
]


def test_parse_exact_angle():
    e = parse("sin(4*pi*t)")
    assert e.eval(0.125) == pytest.approx(1.0, abs=1e-15)


def test_parse_te_at_zero():
    assert parse("t*exp(-t)").eval(0.0) == 0.0


def test_parse_unbalanced_paren():
    with pytest.raises(ExprSyntaxError):
        parse("3*x*exp(-x")


def test_parse_unknown_second_identifier():
    with pytest.raises(ExprSyntaxError, match="unknown identifier"):
        parse("x + y")


def test_parse_empty():
    with pytest.raises(ExprSyntaxError):
        parse("   ")


def test_parse_variable_exponent_rejected():
    with pytest.raises(ExprSyntaxError, match="constant"):
        parse("2^x")


def test_parse_offset_reported():
    with pytest.raises(ExprSyntaxError) as err:
        parse("1 + @")
    assert err.value.offset == 4


def test_eval_simple_rational():
    assert parse("1/(1+t)").eval(1.0) == pytest.approx(0.5, abs=1e-16)


def test_eval_reference_gaussian_at_minus_one():
    e = parse("exp(-(x-1)^2/(4*1+1))/sqrt(4*1+1)")
    assert e.eval(-1.0) == pytest.approx(math.exp(-0.8) / math.sqrt(5), rel=1e-15)


def test_eval_pole_is_domain_error():
    with pytest.raises(ExprDomainError):
        parse("1/(1+t)").eval(-1.0)


def test_eval_sqrt_of_negative_is_domain_error():
    with pytest.raises(ExprDomainError):
        parse("sqrt(x)").eval(-2.0)


@pytest.mark.parametrize("n", [0, 1, 2, 3, 7, 20])
def test_te_derivative_closed_form(n):
    # n-th derivative of t*exp(-t) is (-1)^n e^{-t} (t-n)
    d = parse("t*exp(-t)").diff(n)
    for t in (0.0, 0.3, 1.7):
        assert d.eval(t) == pytest.approx(
            (-1) ** n * math.exp(-t) * (t - n), rel=1e-12, abs=1e-12
        )


@pytest.mark.parametrize("n", [1, 2, 5, 11])
def test_te_derivative_at_zero(n):
    assert parse("t*exp(-t)").diff(n).eval(0.0) == pytest.approx(
        -((-1.0) ** n) * n, rel=1e-13
    )


def test_chain_rule_sin():
    d = parse("sin(4*pi*t)").diff(1)
    for t in (0.0, 0.2, 0.9):
        assert d.eval(t) == pytest.approx(4 * math.pi * math.cos(4 * math.pi * t), rel=1e-13)


@pytest.mark.parametrize("text,point", CORPUS)
def test_derivative_matches_finite_differences(text, point):
    cache = DerivativeCache(parse(text))
    h = 1e-5
    for k in range(1, 9):
        fd = (cache.value(k - 1, point + h) - cache.value(k - 1, point - h)) / (2 * h)
        assert cache.value(k, point) == pytest.approx(fd, rel=1e-6, abs=1e-6)


@pytest.mark.parametrize("text,point", CORPUS)
def test_derivative_composition(text, point):
    e = parse(text)
    for j, k in [(1, 1), (2, 1), (1, 3), (2, 2)]:
        a = e.diff(j + k).eval(point)
        b = e.diff(j).diff(k).eval(point)
        assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("text,point", CORPUS)
def test_print_reparse_roundtrip(text, point):
    e = parse(text)
    r = parse(e.to_text(), var_name=e.var_name)
    xs = np.array([point, point + 0.25, point + 1.0])
    np.testing.assert_allclose(r.eval(xs), e.eval(xs), rtol=1e-13, atol=1e-15)


def test_array_evaluation_matches_scalar():
    e = parse("3*x*exp(-x)")
    xs = np.linspace(0.0, 4.0, 17)
    vals = e.eval(xs)
    assert vals.shape == xs.shape
    for x, v in zip(xs, vals):
        assert v == pytest.approx(e.eval(float(x)), rel=1e-15)


def test_derivative_cache_extends_lazily():
    cache = DerivativeCache(parse("sin(4*pi*t)"))
    v10 = cache.value(10, 0.2)
    assert cache.value(10, 0.2) == v10
    assert len(cache.values_up_to(6, 0.2)) == 7


def test_order_limit():
    with pytest.raises(DerivativeOrderError):
        parse("t*exp(-t)").diff(201)
    with pytest.raises(DerivativeOrderError):
        DerivativeCache(parse("t*exp(-t)"), max_order=5).derivative(6)


def test_high_order_stays_compact():
    # the supported data class must not blow up under repeated differentiation
    d = parse("exp(-1/(4*t+1))/sqrt(4*t+1)").diff(40)
    assert len(d.to_text()) < 40_000
    assert np.isfinite(d.eval(1.0))


def test_complex_evaluation_entire():
    e = parse("2*exp(-x)*cos(x)")
    z = 0.3 + 0.4j
    expected = 2 * np.exp(-z) * np.cos(z)
    assert e.eval_complex(z) == pytest.approx(expected, rel=1e-13)


def test_complex_evaluation_refuses_brancy_ambiguity():
    with pytest.raises(ExprDomainError, match="fractional"):
        parse("sqrt(1+x)").eval_complex(0.5j)
