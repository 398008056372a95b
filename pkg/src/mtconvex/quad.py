"""Adaptive Gauss-Kronrod integration with the semicircle and parabola weights.

The semicircle weights ``sqrt((b-x)(x-a))/(b-a)`` and ``sqrt(t(1-t))`` have
unbounded derivatives at both ends.  They are handled by the substitution
``x = m + h cos(theta)``, under which ``sqrt((b-x)(x-a)) dx`` becomes
``h**2 sin(theta)**2 dtheta`` and the integrand is smooth.
"""

from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .expr import DomainError, FunctionSpec

__all__ = [
    "QuadResult", "Weight", "UndefinedEvaluationError",
    "DEFAULT_TOL", "MAX_INTERVALS",
    "integrate", "integrate_weighted", "integrate_callable",
    "tau_substitution_check", "weight_values",
]

DEFAULT_TOL = 1e-10
MAX_INTERVALS = 10_000

# 21-point Kronrod extension of the 10-point Gauss rule on [-1, 1]
# (QUADPACK dqk21). Odd-indexed nodes are the Gauss nodes.
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208980297980,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])          # ascending, 21 nodes
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(21)
GAUSS_WEIGHTS[1:10:2] = _WG
GAUSS_WEIGHTS[11:20:2] = _WG[::-1]

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny
# per-panel error floor relative to the integral of |f|
ROUNDOFF = 50.0 * _EPS


class UndefinedEvaluationError(ArithmeticError):
    """The integrand was undefined at ``point`` inside the domain."""

    def __init__(self, point: float, what: str = "integrand"):
        self.point = point
        super().__init__(f"{what} is undefined at x = {point!r}")


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error_estimate: float
    evaluations: int
    converged: bool

    def scaled(self, c: float) -> "QuadResult":
        return QuadResult(c * self.value, abs(c) * self.abs_error_estimate,
                          self.evaluations, self.converged)


class Weight(enum.Enum):
    NONE = "none"
    TAU = "tau"
    MU = "mu"
    SQRT_T_ONE_MINUS_T = "sqrt_t_one_minus_t"


def weight_values(w: Weight, x, a: float, b: float) -> np.ndarray:
    """Pointwise weight on [a, b] (for checks and plots; not used for integration)."""
    x = np.asarray(x, dtype=float)
    prod = np.clip((b - x) * (x - a), 0.0, None)
    if w is Weight.NONE:
        return np.ones_like(x)
    if w is Weight.TAU:
        return np.sqrt(prod) / (b - a)
    if w is Weight.MU:
        return prod / (b - a) ** 2
    if w is Weight.SQRT_T_ONE_MINUS_T:
        return np.sqrt(np.clip(x * (1.0 - x), 0.0, None))
    raise ValueError(f"unknown weight {w!r}")


def _gk21(fn, lo: float, hi: float):
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    fx = fn(centre + half * NODES)
    kronrod = half * float(np.dot(KRONROD_WEIGHTS, fx))
    gauss = half * float(np.dot(GAUSS_WEIGHTS, fx))
    resabs = abs(half) * float(np.dot(KRONROD_WEIGHTS, np.abs(fx)))
    mean = kronrod / (2.0 * half) if half else 0.0
    resasc = abs(half) * float(np.dot(KRONROD_WEIGHTS, np.abs(fx - mean)))
    err = abs(kronrod - gauss)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > _TINY / (50.0 * _EPS):
        err = max(ROUNDOFF * resabs, err)
    return kronrod, err, resabs


def integrate_callable(fn: Callable[[np.ndarray], np.ndarray], lo: float, hi: float,
                       tol: float = DEFAULT_TOL, max_intervals: int = MAX_INTERVALS,
                       point_map: Callable[[float], float] | None = None) -> QuadResult:
    """Globally adaptive GK21 on a vectorised integrand.

    The panel with the largest error estimate is bisected until the summed
    estimate drops below ``tol`` or ``max_intervals`` panels exist.  When
    ``tol`` is below what double precision can resolve for this integrand
    (twice the summed per-panel roundoff floor), that floor is the target
    instead and ``abs_error_estimate`` reports the larger error.  NaN
    integrand values raise :class:`UndefinedEvaluationError`; ``point_map``
    translates the offending abscissa back to the caller's variable.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")

    def checked(xs):
        ys = np.asarray(fn(xs), dtype=float)
        bad = ~np.isfinite(ys)
        if bad.any():
            p = float(xs[np.flatnonzero(bad)[0]])
            raise UndefinedEvaluationError(point_map(p) if point_map else p)
        return ys

    value, err, resabs = _gk21(checked, lo, hi)
    evaluations = 21
    # heap keyed on -err, then left endpoint, so ordering is deterministic
    heap = [(-err, lo, hi, value, resabs)]
    # running sums; the final error is recomputed exactly below
    run_err, run_abs = err, resabs
    while run_err > max(tol, 2.0 * ROUNDOFF * run_abs) and len(heap) < max_intervals:
        item = heapq.heappop(heap)
        neg_e, a, b, _, r = item
        mid = 0.5 * (a + b)
        if not a < mid < b:
            heapq.heappush(heap, item)  # panel at machine resolution
            break
        run_err += neg_e
        run_abs -= r
        for lo_, hi_ in ((a, mid), (mid, b)):
            v, e, r = _gk21(checked, lo_, hi_)
            evaluations += 21
            run_err += e
            run_abs += r
            heapq.heappush(heap, (-e, lo_, hi_, v, r))

    panels = sorted(heap, key=lambda item: item[1])
    value = math.fsum(p[3] for p in panels)
    total_err = math.fsum(-p[0] for p in panels)
    target = max(tol, 2.0 * ROUNDOFF * math.fsum(p[4] for p in panels))
    return QuadResult(value, total_err, evaluations, total_err <= target)


def integrate(f: FunctionSpec, tol: float = DEFAULT_TOL) -> QuadResult:
    """Integral of ``f`` over its domain."""
    return integrate_callable(f.values, f.domain.a, f.domain.b, tol)


def integrate_weighted(f: FunctionSpec, w: Weight | str, tol: float = DEFAULT_TOL) -> QuadResult:
    """Integral of ``w(x) f(x)`` over the domain of ``f``.

    No normalising prefactor is applied: for ``Weight.TAU`` this returns
    ``int_a^b sqrt((b-x)(x-a))/(b-a) f(x) dx``.
    """
    w = Weight(w)
    a, b = f.domain.a, f.domain.b
    if w is Weight.NONE:
        return integrate(f, tol)
    if w is Weight.MU:
        width2 = (b - a) ** 2

        def integrand(x):
            return (b - x) * (x - a) / width2 * f.values(x)

        return integrate_callable(integrand, a, b, tol)
    if w is Weight.SQRT_T_ONE_MINUS_T and (a, b) != (0.0, 1.0):
        raise DomainError("the sqrt(t(1-t)) weight lives on [0, 1]")

    # x = m + h cos(theta) turns sqrt((b-x)(x-a)) dx into h^2 sin^2(theta) dtheta
    m, h = 0.5 * (a + b), 0.5 * (b - a)
    scale = h * h / (b - a) if w is Weight.TAU else h * h

    def integrand(theta):
        xs = np.clip(m + h * np.cos(theta), a, b)
        s = np.sin(theta)
        return s * s * f.values(xs)

    res = integrate_callable(integrand, 0.0, math.pi, tol / scale,
                             point_map=lambda th: m + h * math.cos(th))
    return res.scaled(scale)


def tau_substitution_check(f: FunctionSpec, tol: float = DEFAULT_TOL) -> float:
    """|int_0^1 sqrt(t(1-t)) f(ta+(1-t)b) dt - (1/(b-a)) int_a^b tau f dx|.

    The t-side is integrated directly, singular endpoints and all, so it
    shares nothing with the substitution used on the x-side.
    """
    a, b = f.domain.a, f.domain.b

    def composed(t):
        xs = np.clip(t * a + (1.0 - t) * b, a, b)
        return np.sqrt(t * (1.0 - t)) * f.values(xs)

    direct = integrate_callable(composed, 0.0, 1.0, tol,
                                point_map=lambda t: t * a + (1.0 - t) * b)
    via_tau = integrate_weighted(f, Weight.TAU, tol).scaled(1.0 / (b - a))
    return abs(direct.value - via_tau.value)
