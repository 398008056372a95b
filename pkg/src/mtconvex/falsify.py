"""Counterexample search for the pointwise class predicates.

A coarse pass (half uniform grid, half seeded uniform samples) locates the
largest violation; coordinate-wise golden-section ascent then pushes the
violation up.  Margins during refinement are computed with the exact scalar
evaluator, so every returned witness re-checks at its stated coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .classes import (
    PREDICATES, Witness, pointwise_sides, select_witness_index, violation_threshold,
)
from .expr import DomainError, FunctionSpec

__all__ = ["SearchBudget", "falsify_pointwise", "refine_witness", "pointwise_violation",
           "scalar_sides", "golden_section_max"]

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
SWEEPS_PER_ITER = 3


@dataclass(frozen=True)
class SearchBudget:
    coarse_evals: int = 10_000
    refine_iters: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.coarse_evals < 27:
            raise ValueError("coarse_evals must be at least 27")
        if self.refine_iters < 0:
            raise ValueError("refine_iters must be nonnegative")


def scalar_sides(pred: str, f: FunctionSpec, g: Optional[FunctionSpec],
                 x: float, y: float, t: Optional[float]):
    """``(lhs, rhs)`` of the predicate at one point using the scalar evaluator."""
    a, b = f.domain.a, f.domain.b
    if pred == "so":
        fx, fy, gx, gy = f(x), f(y), g(x), g(y)
        return -((fx - fy) * (gx - gy)), 0.0
    if pred == "midpoint":
        return f(min(max(0.5 * (x + y), a), b)), 0.5 * (f(x) + f(y))
    z = min(max(t * x + (1.0 - t) * y, a), b)
    if pred == "convex":
        return f(z), t * f(x) + (1.0 - t) * f(y)
    rt, rs = math.sqrt(t), math.sqrt(1.0 - t)
    return f(z), rt / (2.0 * rs) * f(x) + rs / (2.0 * rt) * f(y)


def pointwise_violation(pred: str, f: FunctionSpec, g: Optional[FunctionSpec],
                        x: float, y: float, t: Optional[float] = None) -> float:
    """``lhs - rhs`` of the predicate at one point, by exact scalar evaluation.

    Positive means the predicate fails there; NaN means an undefined value.
    """
    lhs, rhs = scalar_sides(pred, f, g, x, y, t)
    return lhs - rhs


def _is_violation(excess: float, rhs: float) -> bool:
    return excess > violation_threshold(rhs)


def golden_section_max(fn: Callable[[float], float], lo: float, hi: float,
                       tol: float = 1e-12, max_iter: int = 200) -> tuple[float, float]:
    """Maximise ``fn`` on [lo, hi]; the endpoints are candidates too.

    NaN values count as -inf.  Returns ``(argmax, max)``.
    """

    def val(v):
        r = fn(v)
        return -math.inf if math.isnan(r) else r

    best_x, best_f = lo, val(lo)
    f_hi = val(hi)
    if f_hi > best_f:
        best_x, best_f = hi, f_hi
    a, b = lo, hi
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = val(x1), val(x2)
    for _ in range(max_iter):
        if b - a <= tol * max(1.0, abs(a), abs(b)):
            break
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = val(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = val(x2)
    for cand_x, cand_f in ((x1, f1), (x2, f2)):
        if cand_f > best_f:
            best_x, best_f = cand_x, cand_f
    return best_x, best_f


def _bounds(pred: str, f: FunctionSpec, t_margin: float):
    a, b = f.domain.a, f.domain.b
    bounds = [(a, b), (a, b)]
    if PREDICATES[pred] == 3:
        bounds.append((t_margin, 1.0 - t_margin) if pred == "mt" else (0.0, 1.0))
    return bounds


def refine_witness(pred: str, f: FunctionSpec, w: Witness, iters: int = 10,
                   g: Optional[FunctionSpec] = None, t_margin: float = 1e-6) -> Witness:
    """Improve a violation witness by coordinate-wise golden-section ascent.

    Each iteration runs three sweeps over the coordinates; the search bracket
    around the current point halves every iteration.  A move is kept only if
    it strictly increases the violation, so the margin never decreases.
    """
    if not w.margin > 0:
        raise ValueError("refine_witness needs a witness with positive margin")
    if w.kind != "violation":
        return w
    bounds = _bounds(pred, f, t_margin)
    point = [w.x, w.y] + ([w.t] if len(bounds) == 3 else [])
    best = pointwise_violation(pred, f, g, *point)
    if math.isnan(best) or best < w.margin:
        best = w.margin

    for k in range(iters):
        for _ in range(SWEEPS_PER_ITER):
            for i, (lo, hi) in enumerate(bounds):
                radius = (hi - lo) * 0.5 ** k
                seg_lo, seg_hi = max(lo, point[i] - radius), min(hi, point[i] + radius)

                def along(v, i=i):
                    trial = list(point)
                    trial[i] = v
                    return pointwise_violation(pred, f, g, *trial)

                v, val = golden_section_max(along, seg_lo, seg_hi)
                if val > best:
                    point[i], best = v, val

    t = point[2] if len(point) == 3 else None
    if best <= w.margin:
        return w
    return Witness(point[0], point[1], t, best)


def falsify_pointwise(pred: str, f: FunctionSpec, budget: SearchBudget = SearchBudget(),
                      g: Optional[FunctionSpec] = None,
                      t_margin: float = 1e-6) -> Optional[Witness]:
    """Search for a point where predicate ``pred`` fails; ``None`` if none is found.

    ``pred`` is one of "convex", "midpoint", "mt", "so".  Undefined values
    come back as a "domain_failure" witness, and for "mt" a negative value
    of ``f`` comes back as a "negative_value" witness.
    """
    if pred not in PREDICATES:
        raise ValueError(f"unknown predicate {pred!r}; expected one of {sorted(PREDICATES)}")
    if pred == "so" and g is None:
        raise ValueError("similarly-ordered search needs two functions")
    if g is not None and g.domain != f.domain:
        raise DomainError("functions must share a domain")

    bounds = _bounds(pred, f, t_margin)
    dims = len(bounds)
    n_grid_total = budget.coarse_evals // 2
    per_axis = max(3, int(math.floor(n_grid_total ** (1.0 / dims) + 1e-9)))
    axes = [np.linspace(lo, hi, per_axis) for lo, hi in bounds]
    grid = [c.ravel() for c in np.meshgrid(*axes, indexing="ij")]
    n_rand = max(0, budget.coarse_evals - per_axis ** dims)
    rng = np.random.default_rng(budget.seed)
    rand = [rng.uniform(lo, hi, n_rand) for lo, hi in bounds]
    coords = [np.concatenate([gc, rc]) for gc, rc in zip(grid, rand)]
    x, y = coords[0], coords[1]
    t = coords[2] if dims == 3 else None

    lhs, rhs = pointwise_sides(pred, f, g, x, y, t)
    undefined = np.isnan(lhs) | np.isnan(rhs)
    if undefined.any():
        i = int(np.flatnonzero(undefined)[0])
        return Witness(float(x[i]), float(y[i]), None if t is None else float(t[i]),
                       math.inf, kind="domain_failure")

    if pred == "mt":
        pts = np.concatenate([x, y])
        vals = f.values(pts)
        if (vals < 0).any():
            j = int(np.argmin(vals))
            return Witness(float(pts[j]), None, None, float(-vals[j]), kind="negative_value")

    excess = lhs - rhs
    violating = excess > violation_threshold(rhs)
    if not violating.any():
        return None
    scores = np.where(violating, excess, -np.inf)
    i = select_witness_index(scores, x, y, t)
    px, py = float(x[i]), float(y[i])
    pt = None if t is None else float(t[i])

    # confirm with the scalar evaluator before trusting the vectorised value
    lhs_s, rhs_s = scalar_sides(pred, f, g, px, py, pt)
    margin = lhs_s - rhs_s
    if math.isnan(margin):
        return Witness(px, py, pt, math.inf, kind="domain_failure")
    if not _is_violation(margin, rhs_s):
        return None
    w = Witness(px, py, pt, margin)
    if budget.refine_iters:
        w = refine_witness(pred, f, w, budget.refine_iters, g, t_margin)
    return w
