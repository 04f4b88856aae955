"""Half-line heat: recovery, Taylor data, extensions, boundary-to-initial."""

import math

import numpy as np
import pytest

from utmcont.expr import parse
from utmcont.continuous import (
    ProblemSpec,
    boundary_to_initial,
    evaluate_boundary_integral,
    evaluate_extended,
    evaluate_I0,
    reference_whole_line,
    taylor_coefficients,
)
from utmcont.continuous import heat


def test_whole_line_recovery(heat_gaussian):
    for x in (-3.0, -1.0, 0.0, 0.5, 2.0, 5.0):
        ua = evaluate_extended(heat_gaussian, x, 1.0, 1e-10)
        ur = reference_whole_line("gaussian-drift", x, 1.0)
        assert ua == pytest.approx(ur, abs=5e-11)


def test_extended_at_example_point(heat_gaussian):
    # continuation value at (-1, 1) equals the whole-line solution there
    assert evaluate_extended(heat_gaussian, -1.0, 1.0) == pytest.approx(
        math.exp(-0.8) / math.sqrt(5.0), abs=1e-11
    )


def test_i0_zero_data():
    spec = ProblemSpec("heat-dirichlet", u0=parse("0*x"), f0=parse("t*exp(-t)"))
    for x, t in ((0.5, 0.3), (-1.0, 1.0)):
        assert evaluate_I0(spec, x, t) == 0.0


def test_i0_against_method_of_images():
    # u0 = e^-y with zero boundary datum: whole-line heat kernel against the
    # odd extension of u0
    spec = ProblemSpec("heat-dirichlet", u0=parse("exp(-x)"), f0=parse("0*t"))
    x, t = 0.5, 0.25

    oracle = 0.0  # trapezoid on each side of the odd-extension kink
    for lo, hi, sgn in ((-40.0, 0.0, -1.0), (0.0, 40.0, 1.0)):
        ys = np.linspace(lo, hi, 800_001)
        kernel = np.exp(-((x - ys) ** 2) / (4 * t)) / math.sqrt(4 * math.pi * t)
        oracle += np.trapezoid(kernel * sgn * np.exp(-np.abs(ys)), ys)

    val = evaluate_extended(spec, x, t, 1e-11)
    assert val == pytest.approx(oracle, abs=2e-9)
    assert evaluate_I0(spec, x, t, 1e-11) == pytest.approx(oracle, abs=2e-9)


def test_boundary_recovery(heat_gaussian):
    for t in (0.1, 0.5, 1.0):
        ua = evaluate_extended(heat_gaussian, 0.0, t, 1e-10)
        assert ua == pytest.approx(heat_gaussian.f0.eval(t), abs=1e-8)


def test_boundary_integral_limit(heat_te):
    # x -> 0+ limit of the boundary integral is the datum
    t = 0.7
    val = evaluate_boundary_integral(heat_te, "f0", 1e-7, t, 1e-12)
    assert val == pytest.approx(0.7 * math.exp(-0.7), abs=1e-7)
    assert evaluate_boundary_integral(heat_te, "f0", 0.0, t) == pytest.approx(
        0.7 * math.exp(-0.7), rel=1e-14
    )


def test_zero_datum_odd_symmetry():
    spec = ProblemSpec("heat-dirichlet", u0=parse("exp(-(x-1)^2)"),
                       f0=parse("0*t"))
    for x in (0.3, 1.1, 2.4):
        a = evaluate_extended(spec, x, 0.7, 1e-11)
        b = evaluate_extended(spec, -x, 0.7, 1e-11)
        assert a == pytest.approx(-b, abs=1e-11)


def test_tilde_closed_form(heat_te):
    # f0 = t e^-t gives tilde = e^-t (2t cos x + x sin x)
    for t in (0.1, 1.0):
        for x in np.linspace(-5.0, 5.0, 21):
            got = heat.tilde_value(heat_te, float(x), t, 1e-12)
            want = math.exp(-t) * (2 * t * math.cos(x) + x * math.sin(x))
            assert got == pytest.approx(want, abs=1e-10)


def test_tilde_constant_datum():
    spec = ProblemSpec("heat-dirichlet", u0=parse("exp(-x^2)"),
                       f0=parse("3 + 0*t"))
    ext = taylor_coefficients(spec, "f0", 0.5, 12)
    assert ext.coeffs[0] == pytest.approx(3.0)
    assert all(abs(c) < 1e-15 for c in ext.coeffs[1:])
    assert heat.tilde_value(spec, 1.7, 0.5) == pytest.approx(6.0, rel=1e-12)


def test_full_series_matches_kernel(heat_gaussian):
    # even + odd Taylor series of the boundary part against the closed
    # kernel convolution, on the native side
    t = 0.7
    ext = taylor_coefficients(heat_gaussian, "f0", t, 25, parity="all")
    for x in (0.1, 0.4, 0.9):
        series = ext.series(x)
        kernel = evaluate_boundary_integral(heat_gaussian, "f0", x, t, 1e-12)
        assert series == pytest.approx(kernel, abs=1e-11)


def test_full_series_gives_extension_at_negative_args(heat_gaussian):
    # series representation continues to x < 0 and matches tilde - kernel
    t = 0.7
    ext = taylor_coefficients(heat_gaussian, "f0", t, 30, parity="all")
    for x in (-0.2, -0.6):
        series = ext.series(x)
        extension = heat.tilde_value(heat_gaussian, x, t, 1e-12) - \
            evaluate_boundary_integral(heat_gaussian, "f0", -x, t, 1e-12)
        assert series == pytest.approx(extension, abs=1e-10)


def test_interior_agreement(heat_gaussian):
    for x in (0.4, 1.7):
        whole = evaluate_extended(heat_gaussian, x, 1.0, 1e-10)
        parts = evaluate_I0(heat_gaussian, x, 1.0, 1e-10) + \
            evaluate_boundary_integral(heat_gaussian, "f0", x, 1.0, 1e-10)
        assert whole == pytest.approx(parts, abs=1e-9)


def test_truncation_convergence(heat_gaussian):
    # adding ten more orders beyond the adaptive stop changes nothing
    t = 1.0
    ext30 = taylor_coefficients(heat_gaussian, "f0", t, 60)
    ext40 = taylor_coefficients(heat_gaussian, "f0", t, 80)
    for x in (-2.0, -3.0):
        assert ext30.tilde(x) == pytest.approx(ext40.tilde(x), abs=1e-10)


def test_pde_residual_both_sides(heat_gaussian):
    u = lambda x, t: evaluate_extended(heat_gaussian, x, t, 1e-11)
    for x0 in (0.7, -0.7):
        res = []
        for h in (0.08, 0.04):
            ut = (u(x0, 1.0 + h) - u(x0, 1.0 - h)) / (2 * h)
            uxx = (u(x0 + h, 1.0) - 2 * u(x0, 1.0) + u(x0 - h, 1.0)) / h**2
            res.append(abs(ut - uxx))
        assert res[1] < res[0] / 2.5  # second-order shrinkage
        assert res[1] < 5e-4


def one_sided_derivatives(u, h=0.1, deg=7):
    """Orders 0..3 at 0+ and 0- from one-sided degree-``deg`` fits."""
    offsets = np.arange(1, deg + 1) * h
    u0val = u(0.0)
    sides = []
    for sign in (1.0, -1.0):
        xs = np.concatenate([[0.0], sign * offsets])
        vals = [u0val] + [u(float(x)) for x in xs[1:]]
        coeffs = np.polyfit(xs, vals, deg)
        sides.append([np.polyval(np.polyder(coeffs, k), 0.0)
                      for k in range(4)])
    return sides


def test_smooth_gluing(heat_gaussian):
    # one-sided derivative match at x = 0 through order 3
    right, left = one_sided_derivatives(
        lambda x: evaluate_extended(heat_gaussian, x, 1.0, 1e-12)
    )
    for k in range(4):
        assert right[k] == pytest.approx(left[k], abs=1e-5)


def test_w0_images_and_te_value(heat_te):
    # zero datum: odd image; t e^-t datum: closed form x sin x
    spec0 = ProblemSpec("heat-dirichlet", u0=parse("exp(-(x-1)^2)"),
                        f0=parse("0*t"))
    assert boundary_to_initial(spec0, -1.5) == pytest.approx(
        -math.exp(-(1.5 - 1.0) ** 2), rel=1e-12
    )
    got = boundary_to_initial(heat_te, -2.0)
    want = (-2.0) * math.sin(-2.0) - heat_te.u0.eval(2.0)
    assert got == pytest.approx(want, rel=1e-12)


def test_w0_compatible_is_continuation(heat_gaussian):
    for x in (-0.4, -1.2):
        assert boundary_to_initial(heat_gaussian, x) == pytest.approx(
            reference_whole_line("gaussian-drift", x, 0.0), abs=1e-10
        )


# ---------------------------------------------------------------------------
# Neumann
# ---------------------------------------------------------------------------


def test_neumann_even_image():
    spec = ProblemSpec("heat-neumann", u0=parse("exp(-(x-1)^2)"),
                       f1=parse("0*t"))
    for x in (0.4, 1.3):
        a = evaluate_extended(spec, x, 0.5, 1e-11)
        b = evaluate_extended(spec, -x, 0.5, 1e-11)
        assert a == pytest.approx(b, abs=1e-12)


def test_neumann_slope_recovery(neumann_spec):
    t, h = 0.3, 1e-4
    u = lambda x: evaluate_extended(neumann_spec, x, t, 1e-11)
    slope = (u(-2 * h) - 8 * u(-h) + 8 * u(h) - u(2 * h)) / (12 * h)
    assert slope == pytest.approx(neumann_spec.f1.eval(t), abs=1e-9)


def test_neumann_w0_even_image():
    spec = ProblemSpec("heat-neumann", u0=parse("exp(-(x-1)^2)"),
                       f1=parse("0*t"))
    assert boundary_to_initial(spec, -0.8) == pytest.approx(
        float(spec.u0.eval(0.8)), rel=1e-12
    )


def test_coefficient_factorial_decay_bound(heat_gaussian):
    # |a_{2n}| (2n)! r^n / n! stays bounded for r inside the datum's
    # analyticity radius (bound-shape of the entire-series estimate)
    ext = taylor_coefficients(heat_gaussian, "f0", 1.0, 120)
    ratios = [
        abs(c) * math.factorial(o) * 1.0**(o // 2) / math.factorial(o // 2)
        for o, c in zip(ext.orders, ext.coeffs)
    ]
    assert max(ratios[30:]) <= max(ratios[:30]) + 1e-12


def test_outside_window_error_half_line(heat_gaussian):
    from utmcont.continuous import OutsideWindowError

    with pytest.raises(OutsideWindowError):
        evaluate_boundary_integral(heat_gaussian, "f0", -0.5, 1.0)
