"""Problem descriptions, reference solutions, and compatibility checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..expr import DerivativeCache, Expression
from ..quad import HalfLineTransform

__all__ = [
    "ProblemSpec",
    "TaylorExtension",
    "ProblemSpecError",
    "DecayClassError",
    "KINDS",
    "reference_whole_line",
    "REFERENCE_NAMES",
    "check_compatibility",
    "compatible_to_order",
    "transport_solution",
]

KINDS = (
    "transport",
    "heat-dirichlet",
    "heat-neumann",
    "heat-finite-interval",
    "advected-heat",
    "kdv-one-bc",
    "kdv-two-bc",
)

_REQUIRED_DATA = {
    "transport": ("u0",),
    "heat-dirichlet": ("u0", "f0"),
    "heat-neumann": ("u0", "f1"),
    "heat-finite-interval": ("u0", "f0", "g0"),
    "advected-heat": ("u0", "f0"),
    "kdv-one-bc": ("u0", "f0"),
    "kdv-two-bc": ("u0", "f0", "f1"),
}


class ProblemSpecError(ValueError):
    """Inconsistent problem description."""


class DecayClassError(ValueError):
    """Initial datum decays too slowly for the requested representation."""


@dataclass
class ProblemSpec:
    """Tagged IBVP description.

    ``u0_decay`` declares the decay class of the initial datum on the
    half-line: ("gaussian",), ("exponential", rate), or ("auto",) to probe
    numerically.  The finite interval ignores it.
    """

    kind: str
    u0: Expression | None = None
    f0: Expression | None = None
    f1: Expression | None = None
    g0: Expression | None = None
    c: float = 0.0
    L: float = 0.0
    u0_decay: tuple = ("auto",)
    _ws: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ProblemSpecError(f"unknown problem kind {self.kind!r}")
        for name in _REQUIRED_DATA[self.kind]:
            if name == "f0" and self.kind == "transport" and self.c <= 0:
                continue
            if getattr(self, name) is None:
                raise ProblemSpecError(f"{self.kind} requires datum {name!r}")
        if self.kind == "transport":
            if self.c == 0:
                raise ProblemSpecError("transport requires a nonzero speed c")
            if self.c > 0 and self.f0 is None:
                raise ProblemSpecError("transport with c > 0 requires f0")
        if self.kind == "heat-finite-interval" and self.L <= 0:
            raise ProblemSpecError("finite interval requires L > 0")

    # -- caches --------------------------------------------------------

    def deriv(self, which):
        key = ("deriv", which)
        if key not in self._ws:
            self._ws[key] = DerivativeCache(getattr(self, which))
        return self._ws[key]

    def decay(self):
        """Resolved decay class of u0: ("gaussian",) or ("exponential", rate)."""
        key = ("decay",)
        if key not in self._ws:
            self._ws[key] = _resolve_decay(self.u0, self.u0_decay)
        return self._ws[key]

    def transform(self, max_im=0.0, tol=1e-13):
        """Cached half-line transform of u0 valid for Im k <= max_im."""
        key = ("hlt", round(max_im, 12))
        if key not in self._ws:
            kind, *rest = self.decay()
            rate = rest[0] if rest else 1.0
            self._ws[key] = HalfLineTransform(
                self.u0, kind, rate, tol=tol, max_im=max_im
            )
        return self._ws[key]


def _resolve_decay(u0, declared):
    if declared and declared[0] != "auto":
        return tuple(declared)
    # probe |u0| at growing y; superexponential decay shows an accelerating
    # log-slope, exponential a stable one
    ys = np.array([2.0, 4.0, 8.0, 16.0, 32.0])
    vals = np.abs(np.asarray(u0.eval(ys), dtype=float))
    if np.all(vals < 1e-300):
        return ("gaussian",)
    tiny = vals < 1e-280
    logs = np.log(np.where(tiny, 1e-300, vals))
    slopes = -(logs[1:] - logs[:-1]) / (ys[1:] - ys[:-1])
    if np.any(tiny) or slopes[-1] > 2.5 * max(slopes[0], 1e-9):
        return ("gaussian",)
    # algebraic tails show a log-slope that keeps halving per doubling of y
    halving = all(b < 0.62 * a for a, b in zip(slopes, slopes[1:]))
    rate = float(np.min(slopes))
    if rate <= 0.02 or (halving and slopes[-1] < 0.25):
        raise DecayClassError(
            "initial datum does not decay fast enough for a half-line transform"
        )
    return ("exponential", 0.9 * rate)


@dataclass
class TaylorExtension:
    """Computed Taylor data of a boundary integral about ``expansion_point``.

    ``orders`` are the global exponents carried (structural zeros omitted);
    ``parity`` records which sub-series this is.  ``tilde(x)`` evaluates the
    doubled series 2 * sum c_m (x - x0)^m used by the reflection extensions.
    """

    which: str
    t: float
    expansion_point: float
    parity: str
    orders: list
    coeffs: list
    truncation_order: int
    stop_reason: str

    def tilde(self, x):
        return 2.0 * self.series(x)

    def series(self, x):
        dx = x - self.expansion_point
        total = 0.0
        for m, c in zip(self.orders, self.coeffs):
            total += c * dx**m
        return total


# ---------------------------------------------------------------------------
# Reference whole-line solutions
# ---------------------------------------------------------------------------


def _gaussian_drift(x, t):
    return math.exp(-((x - 1.0) ** 2) / (4.0 * t + 1.0)) / math.sqrt(4.0 * t + 1.0)


def _kdv_decaying_cos(x, t):
    return 2.0 * math.exp(-(x + 2.0 * t)) * math.cos(x - 2.0 * t)


def _kdv2_exp_cos(x, t):
    return 2.0 * math.exp(-math.sqrt(3.0) * x) * math.cos(x + 8.0 * t)


_REFERENCES = {
    "gaussian-drift": _gaussian_drift,
    "kdv-decaying-cos": _kdv_decaying_cos,
    "kdv2-exp-cos": _kdv2_exp_cos,
}

REFERENCE_NAMES = (
    "gaussian-drift",
    "gaussian-drift-advected",
    "kdv-decaying-cos",
    "kdv2-exp-cos",
    "transport-dalembert",
)


def reference_whole_line(name, x, t, c=1.0, u0=None, f0=None):
    """Evaluate a named exact whole-line solution.

    ``gaussian-drift-advected`` is the drifting Gaussian in the advected frame
    u(x + c t + 1, t); ``transport-dalembert`` needs the transport data (u0,
    f0, c).
    """
    if name in _REFERENCES:
        return _REFERENCES[name](x, t)
    if name == "gaussian-drift-advected":
        return _gaussian_drift(x + c * t + 1.0, t)
    if name == "transport-dalembert":
        spec = ProblemSpec("transport", u0=u0, f0=f0, c=c)
        return transport_solution(spec, x, t)
    raise KeyError(f"unknown reference solution {name!r}")


def transport_solution(spec, x, t):
    """d'Alembert evaluation of the transport problem, extended off-domain."""
    c = spec.c
    if c < 0:
        return float(spec.u0.eval(x - c * t))
    if t > x / c:
        return float(spec.f0.eval(t - x / c))
    return float(spec.u0.eval(x - c * t))


# ---------------------------------------------------------------------------
# Compatibility conditions
# ---------------------------------------------------------------------------


def _spatial_generator(spec):
    """The spatial operator whose repeated application gives time derivatives
    of the solution at t = 0 (u_t = A u)."""
    kind = spec.kind

    def apply(e):
        if kind in ("heat-dirichlet", "heat-neumann", "heat-finite-interval"):
            return e.diff(2)
        if kind == "advected-heat":
            return e.diff(2) + spec.c * e.diff(1)
        if kind == "kdv-one-bc":
            return -e.diff(3)
        if kind == "kdv-two-bc":
            return e.diff(3)
        raise ProblemSpecError(f"no compatibility conditions for kind {kind!r}")

    return apply


def check_compatibility(spec, orders, detail=False):
    """Per-order residuals |d^n/dt^n(datum)(0) - A^n u0 at the boundary|.

    Returns the per-order maximum over the kind's conditions; with
    ``detail=True`` returns a dict of per-datum residual lists instead.
    """
    apply = _spatial_generator(spec)
    per_datum = {}
    current = spec.u0
    for n in range(orders + 1):
        if spec.kind in ("heat-dirichlet", "advected-heat", "kdv-one-bc",
                         "kdv-two-bc"):
            per_datum.setdefault("f0", []).append(
                abs(spec.deriv("f0").value(n, 0.0) - current.eval(0.0))
            )
        if spec.kind in ("heat-neumann", "kdv-two-bc"):
            per_datum.setdefault("f1", []).append(
                abs(spec.deriv("f1").value(n, 0.0) - current.diff(1).eval(0.0))
            )
        if spec.kind == "heat-finite-interval":
            per_datum.setdefault("f0", []).append(
                abs(spec.deriv("f0").value(n, 0.0) - current.eval(0.0))
            )
            per_datum.setdefault("g0", []).append(
                abs(spec.deriv("g0").value(n, 0.0) - current.eval(spec.L))
            )
        current = apply(current)
    if detail:
        return per_datum
    return [max(col) for col in zip(*per_datum.values())]


def compatible_to_order(spec, order, tol=1e-9):
    return all(r < tol for r in check_compatibility(spec, order))
