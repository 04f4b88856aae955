"""Heat equation on a finite interval with two Dirichlet data.

The initial part integrates over the real line plus a horizontal contour
above the real zeros of sin(kL).  Each boundary integral collapses, via the
geometric expansion of 1/sin(kL), to an image sum of half-line single-layer
potentials, which converges like a Gaussian in the image index.  Outside the
native windows the extensions tile in steps of 2L, accumulating doubled
Taylor series of the data.  The same boundary integral also has the
classical Fourier-sine-series form; both evaluators are exposed and must
agree inside the common window.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as _sp

from ..quad import finite_interval_transform, integrate_segment
from . import _common
from ._common import CoeffLadder, adaptive_series, real_part
from .heat import single_layer

SQRT_PI = math.sqrt(math.pi)


def _interval_transform(spec, k):
    key = ("fit",)
    cache = spec._ws.setdefault(key, {})
    k_arr = np.atleast_1d(np.asarray(k, dtype=complex))
    out = np.empty(k_arr.shape, dtype=complex)
    missing = [i for i, kv in enumerate(k_arr) if kv not in cache]
    for i, kv in enumerate(k_arr):
        if kv in cache:
            out[i] = cache[kv]
    if missing:
        vals = finite_interval_transform(spec.u0, spec.L, k_arr[missing])
        vals = np.atleast_1d(vals)
        for i, v in zip(missing, vals):
            cache[k_arr[i]] = complex(v)
            out[i] = v
    return out if np.ndim(k) else complex(out[0])


def i0(spec, x, t, tol=1e-10):
    """Initial-condition part, entire in x (t > 0)."""
    if spec.u0.is_zero:
        return 0.0
    L = spec.L
    eps = min(1.0, 0.75 / L)
    radius = math.sqrt((math.log(400.0 / tol) + 6.0 + eps * (abs(x) + L)) / t)
    panels = _common.oscillation_panels(2 * radius, abs(x) + L, base=4)

    def line_part(k):
        return np.exp(1j * k * x - k * k * t) * _interval_transform(spec, k)

    def pole_part(z):
        k = np.asarray(z)
        ratio_f = np.exp(1j * k * L) * np.sin(k * x) * _interval_transform(spec, k)
        ratio_g = np.sin(k * (L - x)) * _interval_transform(spec, -k)
        return np.exp(-k * k * t) * (ratio_f + ratio_g) / np.sin(k * L)

    p1 = integrate_segment(line_part, -radius, radius, tol=tol / 4,
                           initial_panels=panels)
    anchor = 1j * eps
    p2 = integrate_segment(pole_part, -radius + anchor, radius + anchor,
                           tol=tol / 4, initial_panels=panels)
    return real_part((p1.value - p2.value) / (2 * math.pi), tol, "interval i0")


def i0_at_zero(spec, x):
    """Closed odd-periodic tiling of u0 (the t -> 0 limit of i0)."""
    L = spec.L
    n = math.floor(x / (2 * L))
    base = x - 2 * n * L
    if base < L:
        return float(spec.u0.eval(base))
    return -float(spec.u0.eval(2 * L - base))


# ---------------------------------------------------------------------------
# boundary integrals in their native windows
# ---------------------------------------------------------------------------


def _image_budget(L, t, tol):
    return 1 + int(math.sqrt(max(4.0 * t * math.log(4.0 / tol), 0.0)) / (2 * L))


def left_boundary_integral(spec, x, t, tol=1e-10):
    """I_{f0}(x, t) for x in [0, 2L): image sum of single-layer potentials."""
    L = spec.L
    if x == 0.0:
        return float(spec.f0.eval(t))
    if not 0 < x < 2 * L:
        raise ValueError("left boundary integral lives on (0, 2L); use the "
                         "tiled extension outside")
    total = 0.0
    for j in range(_image_budget(L, t, tol) + 1):
        total += single_layer(spec.f0, x + 2 * j * L, t, tol)
        total -= single_layer(spec.f0, 2 * (j + 1) * L - x, t, tol)
    return total


def right_boundary_integral(spec, x, t, tol=1e-10):
    """I_{g0}(x, t) for x in (-L, L]: image sum of single-layer potentials."""
    L = spec.L
    if x == L:
        return float(spec.g0.eval(t))
    if not -L < x < L:
        raise ValueError("right boundary integral lives on (-L, L); use the "
                         "tiled extension outside")
    total = 0.0
    for j in range(_image_budget(L, t, tol) + 1):
        total += single_layer(spec.g0, (2 * j + 1) * L - x, t, tol)
        total -= single_layer(spec.g0, (2 * j + 1) * L + x, t, tol)
    return total


# ---------------------------------------------------------------------------
# Fourier-series route for the left boundary integral
# ---------------------------------------------------------------------------


def _sine_tail(order, theta):
    """sum_{n>=1} sin(n theta)/n^order for odd order, theta in [0, 2 pi]."""
    th = theta % (2 * math.pi)
    if order == 1:
        return (math.pi - th) / 2.0 if th != 0.0 else 0.0
    if order == 3:
        return math.pi**2 * th / 6.0 - math.pi * th**2 / 4.0 + th**3 / 12.0
    if order == 5:
        return (
            math.pi**4 * th / 90.0
            - math.pi**2 * th**3 / 36.0
            + math.pi * th**4 / 48.0
            - th**5 / 240.0
        )
    raise ValueError("closed sine tails available for orders 1, 3, 5")


def _mode_coefficient(spec, w, t, tol):
    """e_n(t) = int_0^t e^{-w (t-s)} f0(s) ds by short geometric panels."""
    f0c = spec.deriv("f0").compiled(0)
    upper = min(t, 45.0 / w) if w > 0 else t
    edges = [0.0]
    step = min(upper, 1.0 / max(w, 1.0 / t))
    pos = 0.0
    while pos < upper:
        pos = min(pos + step, upper)
        edges.append(pos)
        step *= 1.7
    xg, wg = np.polynomial.legendre.leggauss(12)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        tau = mid + half * xg
        total += float(np.sum(half * wg * np.exp(-w * tau) * f0c(t - tau)))
    return total


def left_boundary_fourier(spec, x, t, tol=1e-10):
    """Classical Fourier-sine form of I_{f0}: residue series over the zeros
    of sin(kL), with three layers of tail acceleration (the raw terms decay
    like 1/n, so the smooth tail is summed in closed Bernoulli form)."""
    L = spec.L
    cache = spec.deriv("f0")
    n0 = max(12, math.ceil(L / math.pi * math.sqrt(45.0 / t)))
    theta = math.pi * x / L
    total = 0.0
    for n in range(1, n0 + 1):
        w = (n * math.pi / L) ** 2
        total += 2 * n * math.pi / L**2 * _mode_coefficient(spec, w, t, tol) \
            * math.sin(n * theta)
    # Watson layers e_n ~ sum_r (-1)^r f0^{(r)}(t)/w^{r+1} turn the slowly
    # decaying tail into closed Bernoulli-polynomial sine sums
    for r in range(3):
        tail = _sine_tail(2 * r + 1, theta) - sum(
            math.sin(n * theta) / n ** (2 * r + 1) for n in range(1, n0 + 1)
        )
        layer = 2 * math.pi / L**2 * (L**2 / math.pi**2) ** (r + 1)
        total += (-1.0) ** r * cache.value(r, t) * layer * tail
    return total


# ---------------------------------------------------------------------------
# Taylor data and tiled extensions
# ---------------------------------------------------------------------------


def tilde_f0_ladder(spec, t, cap=200):
    key = ("fi-tilde-f0", round(t, 14))
    if key not in spec._ws:
        cache = spec.deriv("f0")

        def build(i):
            return 2 * i, cache.value(i, t) / math.factorial(2 * i)

        spec._ws[key] = CoeffLadder(build, cap=cap)
    return spec._ws[key]


def tilde_g0_ladder(spec, t, cap=200):
    key = ("fi-tilde-g0", round(t, 14))
    if key not in spec._ws:
        cache = spec.deriv("g0")

        def build(i):
            return 2 * i, cache.value(i, t) / math.factorial(2 * i)

        spec._ws[key] = CoeffLadder(build, cap=cap)
    return spec._ws[key]


def tilde_f0(spec, x, t, tol=1e-10):
    value, _, _ = adaptive_series(tilde_f0_ladder(spec, t), x, tol)
    return 2.0 * value


def tilde_g0(spec, x, t, tol=1e-10):
    """Doubled even series about x = L."""
    value, _, _ = adaptive_series(tilde_g0_ladder(spec, t), x - spec.L, tol)
    return 2.0 * value


def _check_tile_depth(spec, x, tile_depth):
    if abs(x) > tile_depth * spec.L:
        raise ValueError(
            f"|x| = {abs(x):g} beyond the supported tiling depth "
            f"{tile_depth} L = {tile_depth * spec.L:g}"
        )


def left_extension(spec, x, t, tol=1e-10, tile_depth=5):
    """I_{f0}^ext: 2L-periodic tiling with accumulated doubled series."""
    _check_tile_depth(spec, x, tile_depth)
    L = spec.L
    n = math.floor(x / (2 * L))
    base = x - 2 * n * L
    value = left_boundary_integral(spec, base, t, tol)
    if n >= 1:
        for j in range(1, n + 1):
            value -= tilde_f0(spec, x - 2 * j * L, t, tol)
    elif n <= -1:
        for j in range(0, -n):
            value += tilde_f0(spec, x + 2 * j * L, t, tol)
    return value


def right_extension(spec, x, t, tol=1e-10, tile_depth=5):
    """I_{g0}^ext: tiling of the (-L, L] window."""
    _check_tile_depth(spec, x, tile_depth)
    L = spec.L
    n = math.ceil((x - L) / (2 * L))
    base = x - 2 * n * L
    value = right_boundary_integral(spec, base, t, tol)
    if n >= 1:
        for j in range(0, n):
            value += tilde_g0(spec, x - 2 * j * L, t, tol)
    elif n <= -1:
        for j in range(1, -n + 1):
            value -= tilde_g0(spec, x + 2 * j * L, t, tol)
    return value


def extended(spec, x, t, tol=1e-10, tile_depth=5):
    return (
        i0(spec, x, t, tol)
        + left_extension(spec, x, t, tol, tile_depth)
        + right_extension(spec, x, t, tol, tile_depth)
    )


def boundary_to_initial(spec, x, tile_depth=5):
    """w0(x): odd-tiled u0 plus the t -> 0 limits of both extensions."""
    _check_tile_depth(spec, x, tile_depth)
    L = spec.L
    value = i0_at_zero(spec, x)

    f0_cache = spec.deriv("f0")
    g0_cache = spec.deriv("g0")

    def tilde_f0_zero(y):
        lad_key = ("fi-tilde-f0-zero",)
        if lad_key not in spec._ws:

            def build(i):
                return 2 * i, f0_cache.value(i, 0.0) / math.factorial(2 * i)

            spec._ws[lad_key] = CoeffLadder(build, cap=200)
        v, _, _ = adaptive_series(spec._ws[lad_key], y, 1e-13)
        return 2.0 * v

    def tilde_g0_zero(y):
        lad_key = ("fi-tilde-g0-zero",)
        if lad_key not in spec._ws:

            def build(i):
                return 2 * i, g0_cache.value(i, 0.0) / math.factorial(2 * i)

            spec._ws[lad_key] = CoeffLadder(build, cap=200)
        v, _, _ = adaptive_series(spec._ws[lad_key], y - L, 1e-13)
        return 2.0 * v

    n = math.floor(x / (2 * L))
    if n >= 1:
        for j in range(1, n + 1):
            value -= tilde_f0_zero(x - 2 * j * L)
    elif n <= -1:
        for j in range(0, -n):
            value += tilde_f0_zero(x + 2 * j * L)

    m = math.ceil((x - L) / (2 * L))
    if m >= 1:
        for j in range(0, m):
            value += tilde_g0_zero(x - 2 * j * L)
    elif m <= -1:
        for j in range(1, -m + 1):
            value -= tilde_g0_zero(x + 2 * j * L)
    return value


# ---------------------------------------------------------------------------
# Taylor series about x = L (odd orders only)
# ---------------------------------------------------------------------------


def odd_center_coefficient(spec, n, t, tol=1e-11, images=8):
    """A_{2n-1}(t): the (2n-1)-st coefficient of the left boundary integral
    about x = L, via the image expansion of its contour kernel (Hermite
    moments of the heat kernel at odd multiples of L)."""
    if n < 1:
        raise ValueError("odd center coefficients start at n = 1")
    L = spec.L
    f0c = spec.deriv("f0").compiled(0)

    def kernel(sigma):
        sigma = np.maximum(np.real(np.asarray(sigma)), 1e-300)
        tau = sigma * sigma
        out = np.zeros_like(sigma)
        for j in range(images):
            y = (2 * j + 1) * L
            # support cutoff: the factors overflow individually where the
            # product (2 z^2 / y)^{2n} e^{-z^2} has already vanished
            zmax = 30.0
            for _ in range(3):
                zmax = math.sqrt(700.0 + 2 * n * math.log(
                    max(2 * zmax * zmax / y, 4.0)))
            z = y / (2.0 * sigma)
            live = z <= zmax
            if not np.any(live):
                continue
            zl = z[live]
            contrib = (4.0 * tau[live]) ** (-n) * _sp.eval_hermite(2 * n, zl)
            out[live] += contrib * np.exp(-zl * zl)
        return out * np.sqrt(math.pi) / sigma

    def integrand(sigma):
        sigma = np.real(np.asarray(sigma))
        return f0c(t - sigma * sigma) * kernel(sigma) * 2.0 * sigma

    res = integrate_segment(integrand, 0.0, math.sqrt(t), tol=tol, rel_tol=tol)
    return -2.0 / (math.pi * math.factorial(2 * n - 1)) * float(
        np.real(res.value)
    )


def center_series(spec, x, t, orders, tol=1e-11):
    """Partial sum of the odd series about x = L for the left boundary part."""
    total = 0.0
    for n in range(1, orders + 1):
        total += odd_center_coefficient(spec, n, t, tol) * (x - spec.L) ** (
            2 * n - 1
        )
    return total
