"""Linear KdV on the half-line: one and two boundary conditions.

One boundary condition (u_t + u_xxx = 0): the initial-condition part is
rewritten over horizontal contours just above the real axis (the rotated
transform arguments stay in the lower half-plane, where the data transform
converges), which makes it entire in x provided the datum decays
exponentially.  The boundary part for x > 0 collapses to an Airy-kernel time
convolution; its Taylor families carry third-root gamma factors and
(t-s)^{-1/3}, (t-s)^{-2/3} convolutions.

Two boundary conditions (u_t - u_xxx = 0): the initial part integrates over
one contour below the real axis and two rotated sector contours; the
boundary parts are evaluated by repeated integration by parts in time, which
trades the oscillatory kernel for derivative data at the corners plus one
smooth remainder convolution over a short dodged contour.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from scipy import special as _sp

from ..quad import SingularKernel, integrate_segment, singular_time_convolution
from ..specfun import gamma
from .problems import DecayClassError, check_compatibility
from ._common import CoeffLadder, adaptive_series, real_part

ALPHA = cmath.exp(2j * math.pi / 3)
SQRT3 = math.sqrt(3.0)


def _airy(z):
    return _sp.airy(z)[0]


def _cubic_radius(decay, growth, log_target):
    """R with decay*R^3 - growth*R >= log_target (few fixed-point passes)."""
    r = (log_target / decay) ** (1.0 / 3.0) + 1.0
    for _ in range(4):
        r = ((log_target + growth * r) / decay) ** (1.0 / 3.0)
    return r + 1.0


# ---------------------------------------------------------------------------
# one boundary condition
# ---------------------------------------------------------------------------


def _kdv1_epsilon(spec):
    kind, *rest = spec.decay()
    if kind == "gaussian":
        return 0.75
    return min(0.45 * rest[0], 0.75)


def i0_one_bc(spec, x, t, tol=1e-10):
    """Initial-condition part of the one-condition problem, entire in x."""
    if spec.u0.is_zero:
        return 0.0
    kind = spec.decay()[0]
    if kind not in ("gaussian", "exponential"):
        raise DecayClassError("one-condition KdV requires exponential decay")
    eps = _kdv1_epsilon(spec)
    tf = spec.transform(max_im=eps, tol=min(tol, 1e-12) * 1e-2)
    a3 = 3.0 * eps * t
    log_target = math.log(400.0 / tol) + eps * abs(x) + eps**3 * t

    # on a horizontal contour the kernel decays like e^{-3 eps kappa^2 t};
    # the wing pieces add rotated-phase growth ~ e^{sqrt(3)|x| kappa / 2}
    growth = SQRT3 * abs(x) / 2.0
    r_mid = math.sqrt(log_target / a3)
    r_wing = (growth + math.sqrt(growth * growth + 4 * a3 * log_target)) / (2 * a3)

    def phase(k):
        return np.exp(1j * k * x + 1j * k**3 * t)

    def center(k):
        return phase(k) * tf(k)

    def left(k):
        rot = np.exp(1j * (ALPHA**2) * k * x + 1j * k**3 * t)
        return phase(k) * ALPHA * tf(ALPHA * k) - rot * tf(k)

    def right(k):
        rot = np.exp(1j * ALPHA * k * x + 1j * k**3 * t)
        return phase(k) * ALPHA**2 * tf(ALPHA**2 * k) - rot * tf(k)

    def connector(k):
        # vertical seam 0 -> i eps: difference between the two wing
        # deformations, which end at i eps while the sector corner sits at 0
        rot1 = np.exp(1j * (ALPHA**2) * k * x + 1j * k**3 * t)
        rot2 = np.exp(1j * ALPHA * k * x + 1j * k**3 * t)
        return (
            phase(k) * (ALPHA**2 * tf(ALPHA**2 * k) - ALPHA * tf(ALPHA * k))
            + (rot1 - rot2) * tf(k)
        )

    panels = 4 + int((abs(x) + 3 * t) * max(r_mid, r_wing) / (2 * math.pi))
    anchor = 1j * eps
    total = integrate_segment(center, -r_mid + anchor, r_mid + anchor,
                              tol=tol / 6, initial_panels=panels).value
    total += integrate_segment(left, -r_wing + anchor, anchor,
                               tol=tol / 6, initial_panels=panels).value
    total += integrate_segment(right, anchor, r_wing + anchor,
                               tol=tol / 6, initial_panels=panels).value
    total += integrate_segment(connector, 0j, anchor, tol=tol / 6).value
    return real_part(total / (2 * math.pi), tol, "kdv1 i0")


def if0_one_bc(spec, x, t, tol=1e-10):
    """Airy-kernel convolution, valid for x > 0 (datum value at x = 0)."""
    if x == 0:
        return float(spec.f0.eval(t))
    if x < 0:
        raise ValueError("one-condition boundary integral needs x >= 0")
    w_low = x / (3.0 * t) ** (1.0 / 3.0)
    w_high = w_low + (1.5 * (math.log(4.0 / tol) + 5.0)) ** (2.0 / 3.0) + 2.0
    f0c = spec.deriv("f0").compiled(0)

    def integrand(w):
        w = np.real(np.asarray(w))
        s = np.clip(t - x**3 / (3.0 * w**3), 0.0, t)
        return f0c(s) * _airy(w)

    res = integrate_segment(integrand, w_low, w_high, tol=tol / 3)
    return real_part(3.0 * res.value, tol, "kdv1 boundary")


def _family_sum_coefficient(cache, m, t, beta, front_sign, tol):
    """Shared shape of the fractional coefficient families:
    sum_{r=1}^{m} (-1)^r G(m-r+beta) t^{-(m-r+beta)} f^{(r-1)}(0)
    + (-1)^m G(beta) * int_0^t f^{(m)}(s) (t-s)^{-beta} ds,
    scaled by front_sign * sqrt(3)/(2 pi (3m-2 or 3m-1)!)."""
    total = 0.0
    for r in range(1, m + 1):
        total += (
            (-1.0) ** r
            * gamma(m - r + beta)
            * t ** -(m - r + beta)
            * cache.value(r - 1, 0.0)
        )
    fm = cache.compiled(m)
    conv = singular_time_convolution(
        SingularKernel(beta, lambda s: fm(np.asarray(s, dtype=float))), t, tol=tol
    )
    total += (-1.0) ** m * gamma(beta) * conv
    return front_sign * SQRT3 / (2.0 * math.pi) * total


def kdv1_coefficient(spec, order, t, tol=1e-11):
    """Taylor coefficient a_order(t) of the one-condition boundary part."""
    cache = spec.deriv("f0")
    if order % 3 == 0:
        m = order // 3
        return (-1.0) ** m * cache.value(m, t) / math.factorial(order)
    if order % 3 == 1:  # order = 3m - 2
        m = (order + 2) // 3
        return _family_sum_coefficient(cache, m, t, 1.0 / 3.0, 1.0, tol) / (
            math.factorial(order)
        )
    m = (order + 1) // 3  # order = 3m - 1
    return _family_sum_coefficient(cache, m, t, 2.0 / 3.0, -1.0, tol) / (
        math.factorial(order)
    )


def kdv1_tilde_ladder(spec, t, tol=1e-11, cap=None):
    cap = cap or spec._ws.get("taylor_cap", 200)
    key = ("kdv1-tilde", round(t, 14))
    if key not in spec._ws:

        def build(i):
            return 2 * i, kdv1_coefficient(spec, 2 * i, t, tol)

        spec._ws[key] = CoeffLadder(build, cap=cap)
    return spec._ws[key]


def kdv1_tilde(spec, x, t, tol=1e-10):
    value, _, _ = adaptive_series(kdv1_tilde_ladder(spec, t), x, tol)
    return 2.0 * value


def kdv1_tilde_at_zero(spec, x, tol=1e-12):
    """Closed small-time limit 3 sum (-1)^m x^{3m} f0^{(m)}(0) / (3m)!."""
    cache = spec.deriv("f0")
    key = ("kdv1-tilde0",)
    if key not in spec._ws:

        def build(i):
            return 3 * i, (-1.0) ** i * cache.value(i, 0.0) / math.factorial(3 * i)

        spec._ws[key] = CoeffLadder(build, cap=200)
    value, _, _ = adaptive_series(spec._ws[key], x, tol)
    return 3.0 * value


def extended_one_bc(spec, x, t, tol=1e-10):
    base = i0_one_bc(spec, x, t, tol)
    if x > 0:
        return base + if0_one_bc(spec, x, t, tol)
    if x == 0:
        return base + float(spec.f0.eval(t))
    return base + kdv1_tilde(spec, x, t, tol) - if0_one_bc(spec, -x, t, tol)


def w0_one_bc(spec, x):
    if x >= 0:
        return float(spec.u0.eval(x))
    rotated = spec.u0.eval_complex(ALPHA * x)
    return kdv1_tilde_at_zero(spec, x) - 2.0 * float(np.real(rotated))


# ---------------------------------------------------------------------------
# two boundary conditions
# ---------------------------------------------------------------------------

# contour angle systems: (inbound angle, outbound angle) per piece
_G0_ANGLES = (-5 * math.pi / 6, -math.pi / 6)
_D1_ANGLES = (math.pi / 2, -math.pi / 6)
_D2_ANGLES = (13 * math.pi / 12, 7 * math.pi / 12)
_RAW1_ANGLES = (math.pi / 3, 0.0)  # undeformed sector edges (in, out)
_RAW2_ANGLES = (math.pi, 2 * math.pi / 3)


def _ray_pair_value(f, angles, t, x, tol, dodge=0.0, panels_extra=0):
    """Integrate f over the (inbound, outbound) ray pair, truncating each ray
    where the cubic decay of e^{-i k^3 t} beats the |e^{ikx}| growth."""
    ain, aout = angles
    total = 0j
    log_target = math.log(600.0 / tol)
    for angle, inbound in ((ain, True), (aout, False)):
        decay = abs(math.sin(3 * angle)) * t
        growth = abs(math.sin(angle) * x)
        radius = _cubic_radius(max(decay, 1e-12), growth, log_target)
        d = cmath.exp(1j * angle)
        a, b = (radius * d, dodge * d) if inbound else (dodge * d, radius * d)
        panels = 2 + panels_extra + int(radius * (abs(x) + 1.0) / (2 * math.pi))
        total += integrate_segment(f, a, b, tol=tol / 6, rel_tol=tol / 6,
                                   initial_panels=panels).value
    if dodge > 0.0:
        a = dodge * cmath.exp(1j * ain)
        b = dodge * cmath.exp(1j * aout)
        total += integrate_segment(f, a, b, tol=tol / 6, rel_tol=tol / 6,
                                   initial_panels=2 + panels_extra).value
    return total


def i0_two_bc(spec, x, t, tol=1e-10):
    """Initial-condition part of the two-condition problem, entire in x."""
    if spec.u0.is_zero:
        return 0.0
    tf = spec.transform(max_im=0.0, tol=min(tol, 1e-12) * 1e-2)

    def f_base(k):
        return np.exp(1j * k * x - 1j * k**3 * t) * tf(k)

    def f_d1(k):
        return np.exp(1j * k * x - 1j * k**3 * t) * tf(ALPHA**2 * k)

    def f_d2(k):
        return np.exp(1j * k * x - 1j * k**3 * t) * tf(ALPHA * k)

    total = _ray_pair_value(f_base, _G0_ANGLES, t, x, tol)
    total -= _ray_pair_value(f_d1, _D1_ANGLES, t, x, tol)
    total -= _ray_pair_value(f_d2, _D2_ANGLES, t, x, tol)
    return real_part(total / (2 * math.pi), tol, "kdv2 i0")


def _growth_rate(cache, t, depth):
    """Crude growth rate of the derivative ladder, for the dodge radius."""
    prev = abs(cache.value(0, 0.0)) + abs(cache.value(0, t)) + 1e-30
    rate = 1.0
    for j in range(1, depth + 1):
        cur = abs(cache.value(j, 0.0)) + abs(cache.value(j, t)) + 1e-30
        rate = max(rate, cur / prev)
        prev = cur
    return rate


_N_IBP = 6


def _kdv2_boundary(spec, which, x, t, tol=1e-10):
    """I_{f0} or I_{f1} for x >= 0 via n-fold integration by parts in time.

    The corner terms use the deformed sector contours (cubic decay); the one
    remaining convolution kernel integrates over the undeformed dodged sector
    boundary, absolutely and uniformly in the time lag.
    """
    cache = spec.deriv("f0" if which == "f0" else "f1")
    n = _N_IBP
    rate = _growth_rate(cache, t, n + 1)
    r0 = max(1.0, (2.2 * rate) ** (1.0 / 3.0))

    if which == "f0":
        weight = lambda k: k**2 / (2 * math.pi)
        coefs = (1.0 - ALPHA, 1.0 - ALPHA**2)
    else:
        weight = lambda k: k / (2j * math.pi)
        coefs = (1.0 - ALPHA**2, 1.0 - ALPHA)

    total = 0j
    for coef, deformed, raw in zip(
        coefs, (_D1_ANGLES, _D2_ANGLES), (_RAW1_ANGLES, _RAW2_ANGLES)
    ):
        # corner terms at fixed t on the decaying contours
        for m in range(1, n + 1):
            fm = cache.value(m - 1, 0.0)
            if fm == 0.0:
                continue

            def fk(k, m=m):
                return weight(k) * np.exp(1j * k * x - 1j * k**3 * t) / (
                    (-1j * k**3) ** m
                )

            total += coef * fm * _ray_pair_value(fk, deformed, t, x, tol,
                                                 dodge=r0)
        # remainder convolution on the undeformed dodged boundary
        total += coef * _kdv2_remainder(cache, weight, raw, r0, n, x, t, tol)
    return real_part(total, tol, f"kdv2 {which} boundary")


def _kdv2_remainder(cache, weight, angles, r0, n, x, t, tol):
    # fixed k-grid along [in-ray, chord, out-ray], truncated where the
    # absolute k^{2-3n} tail is below tol
    radius = max(r0 * 1.6, (1.0 / ((3 * n - 3) * tol * 0.1)) ** (1.0 / (3 * n - 3)))
    ain, aout = angles
    din, dout = cmath.exp(1j * ain), cmath.exp(1j * aout)
    pieces = [
        (radius * din, r0 * din),
        (r0 * din, r0 * dout),
        (r0 * dout, radius * dout),
    ]
    xg, wg = np.polynomial.legendre.leggauss(16)
    knodes, kweights = [], []
    for a, b in pieces:
        length = abs(b - a)
        panels = 2 + int(length * (abs(x) + r0**2) / (2 * math.pi))
        edges = np.linspace(0.0, 1.0, panels + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])
        halves = 0.5 * (edges[1:] - edges[:-1])
        tpar = (mids[:, None] + halves[:, None] * xg[None, :]).ravel()
        knodes.append(a + tpar * (b - a))
        kweights.append((halves[:, None] * wg[None, :]).ravel() * (b - a))
    k = np.concatenate(knodes)
    wk = np.concatenate(kweights) * weight(k) / (-1j * k**3) ** n

    # s-panels resolve the data oscillation
    rate = _growth_rate(cache, t, n + 1)
    spanels = max(8, int(rate * t / 1.5))
    edges = np.linspace(0.0, t, spanels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    halves = 0.5 * (edges[1:] - edges[:-1])
    snodes = (mids[:, None] + halves[:, None] * xg[None, :]).ravel()
    sweights = (halves[:, None] * wg[None, :]).ravel()
    fvals = cache.compiled(n)(snodes)

    kernel = np.exp(1j * k[None, :] * x - 1j * k[None, :] ** 3
                    * (t - snodes[:, None]))
    return (sweights * fvals) @ (kernel @ wk)


def kdv2_coefficient(spec, which, order, t, tol=1e-11):
    """Taylor coefficients: a-family for f0, b-family for f1.  Structural
    zeros (a_{3m-2}, b_{3m}) return exactly 0."""
    if which == "f0":
        cache = spec.deriv("f0")
        if order % 3 == 0:
            return cache.value(order // 3, t) / math.factorial(order)
        if order % 3 == 1:  # a_{3m-2} = 0
            return 0.0
        m = (order + 1) // 3
        total = 0.0
        for r in range(1, m + 1):
            total += (
                (-1.0) ** (m - r)
                * gamma(m - r + 2.0 / 3.0)
                * t ** -(m - r + 2.0 / 3.0)
                * cache.value(r - 1, 0.0)
            )
        fm = cache.compiled(m)
        total += gamma(2.0 / 3.0) * singular_time_convolution(
            SingularKernel(2.0 / 3.0, lambda s: fm(np.asarray(s, dtype=float))),
            t, tol=tol,
        )
        return -SQRT3 / (2 * math.pi * math.factorial(order)) * total
    cache = spec.deriv("f1")
    if order % 3 == 1:  # b_{3m+1}
        return cache.value((order - 1) // 3, t) / math.factorial(order)
    if order % 3 == 0:  # b_{3m} = 0
        return 0.0
    m = (order + 1) // 3  # b_{3m-1}
    total = 0.0
    for r in range(1, m + 1):
        total += (
            (-1.0) ** (m - r)
            * gamma(m - r + 1.0 / 3.0)
            * t ** -(m - r + 1.0 / 3.0)
            * cache.value(r - 1, 0.0)
        )
    fm = cache.compiled(m)
    total += gamma(1.0 / 3.0) * singular_time_convolution(
        SingularKernel(1.0 / 3.0, lambda s: fm(np.asarray(s, dtype=float))),
        t, tol=tol,
    )
    return -SQRT3 / (2 * math.pi * math.factorial(order)) * total


def kdv2_tilde_ladder(spec, which, t, tol=1e-11, cap=None):
    cap = cap or spec._ws.get("taylor_cap", 200)
    key = ("kdv2-tilde", which, round(t, 14))
    if key not in spec._ws:
        if which == "f0":
            # even orders; order = 3m-2 vanishes structurally (skip 4, 10, ...)
            kept = [m for m in range(0, cap + 1) if m % 2 == 0 and m % 3 != 1]
        else:
            kept = [m for m in range(1, cap + 1) if m % 2 == 1 and m % 3 != 0]

        def build(i, kept=kept, which=which):
            if i >= len(kept):
                return cap + 1, 0.0
            order = kept[i]
            return order, kdv2_coefficient(spec, which, order, t, tol)

        spec._ws[key] = CoeffLadder(build, cap=cap)
    return spec._ws[key]


def kdv2_tilde(spec, which, x, t, tol=1e-10):
    value, _, _ = adaptive_series(kdv2_tilde_ladder(spec, which, t), x, tol)
    return 2.0 * value


def extended_two_bc(spec, x, t, tol=1e-10):
    base = i0_two_bc(spec, x, t, tol)
    if x > 0:
        return (base + _kdv2_boundary(spec, "f0", x, t, tol)
                + _kdv2_boundary(spec, "f1", x, t, tol))
    if x == 0:
        return (base + float(spec.f0.eval(t))
                + _kdv2_boundary(spec, "f1", 0.0, t, tol))
    part_f0 = kdv2_tilde(spec, "f0", x, t, tol) - _kdv2_boundary(
        spec, "f0", -x, t, tol
    )
    part_f1 = kdv2_tilde(spec, "f1", x, t, tol) + _kdv2_boundary(
        spec, "f1", -x, t, tol
    )
    return base + part_f0 + part_f1


class IncompatibleDataError(ValueError):
    """Two-condition KdV data admit no boundary-to-initial map."""


def w0_two_bc(spec, x, order=3, tol=1e-9):
    if x >= 0:
        return float(spec.u0.eval(x))
    residuals = check_compatibility(spec, order)
    if any(r > tol for r in residuals):
        raise IncompatibleDataError(
            "boundary and initial data are incompatible (residuals "
            f"{[f'{r:.2e}' for r in residuals]}); the extended solution blows "
            "up as t -> 0+ and no boundary-to-initial map exists"
        )
    return float(spec.u0.eval(x))
