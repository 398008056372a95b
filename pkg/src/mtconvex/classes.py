"""Pointwise membership tests for convex, midpoint-convex, MT-convex and
similarly-ordered functions, and the MT coefficient algebra.

Every predicate is of the form ``lhs <= rhs`` at a point ``(x, y[, t])``.
A check evaluates the slack over a :class:`SamplePlan` and reports the
point of largest violation ``lhs - rhs``.  Sampling can only ever find
counterexamples; "holds_on_samples" is not a proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .expr import DomainError, FunctionSpec

__all__ = [
    "MtCoefficients", "SamplePlan", "Witness", "Verdict",
    "HOLDS", "FAILS", "UNDEFINED_ENCOUNTERED", "PREDICATES",
    "mt_coefficients", "amgm_gap",
    "check_mt_membership", "check_convexity", "check_midpoint_convexity",
    "check_similarly_ordered", "check",
    "pointwise_sides", "violation_threshold", "select_witness_index",
]

HOLDS = "holds_on_samples"
FAILS = "fails"
UNDEFINED_ENCOUNTERED = "undefined_encountered"

# predicate id -> number of coordinates (2: x, y; 3: x, y, t)
PREDICATES = {"convex": 3, "midpoint": 2, "mt": 3, "so": 2}

REL_TOL = 1e-12
TIE_ULPS = 8


@dataclass(frozen=True)
class MtCoefficients:
    lam: float  # multiplies f(x)
    mu: float   # multiplies f(y)
    t: float

    @property
    def total(self) -> float:
        return self.lam + self.mu


def mt_coefficients(t: float) -> MtCoefficients:
    """Weights of f(x) and f(y) in the MT inequality at parameter ``t``.

    >>> mt_coefficients(0.8)
    MtCoefficients(lam=1.0, mu=0.25, t=0.8)
    """
    t = float(t)
    if not 0.0 < t < 1.0:
        raise DomainError(f"t must lie in the open interval (0, 1), got {t!r}")
    rt, rs = math.sqrt(t), math.sqrt(1.0 - t)
    return MtCoefficients(rt / (2.0 * rs), rs / (2.0 * rt), t)


def amgm_gap(x: float, y: float) -> float:
    """Arithmetic minus geometric mean of two nonnegative numbers."""
    if x < 0 or y < 0:
        raise DomainError(f"amgm_gap needs nonnegative arguments, got ({x!r}, {y!r})")
    return 0.5 * (x + y) - math.sqrt(x * y)


@dataclass(frozen=True)
class SamplePlan:
    """Deterministic grid plus seeded uniform samples over points, pairs, triples.

    The grid has ``grid_points`` values per coordinate (so ``grid_points**3``
    triples); ``random_samples`` extra tuples are drawn from
    ``numpy.random.default_rng(seed)``.
    """

    grid_points: int = 64
    random_samples: int = 4096
    seed: int = 0
    t_margin: float = 1e-6

    def __post_init__(self):
        if self.grid_points < 3:
            raise ValueError("grid_points must be at least 3")
        if self.random_samples < 0:
            raise ValueError("random_samples must be nonnegative")
        if not 0.0 < self.t_margin < 0.5:
            raise ValueError("t_margin must lie in (0, 1/2)")

    def pairs(self, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
        g = np.linspace(a, b, self.grid_points)
        gx, gy = np.meshgrid(g, g, indexing="ij")
        rng = np.random.default_rng(self.seed)
        rx = rng.uniform(a, b, self.random_samples)
        ry = rng.uniform(a, b, self.random_samples)
        return np.concatenate([gx.ravel(), rx]), np.concatenate([gy.ravel(), ry])

    def triples(self, a: float, b: float, t_lo: float, t_hi: float):
        g = np.linspace(a, b, self.grid_points)
        tg = np.linspace(t_lo, t_hi, self.grid_points)
        gx, gy, gt = np.meshgrid(g, g, tg, indexing="ij")
        rng = np.random.default_rng(self.seed)
        rx = rng.uniform(a, b, self.random_samples)
        ry = rng.uniform(a, b, self.random_samples)
        rt = rng.uniform(t_lo, t_hi, self.random_samples)
        return (np.concatenate([gx.ravel(), rx]),
                np.concatenate([gy.ravel(), ry]),
                np.concatenate([gt.ravel(), rt]))


@dataclass(frozen=True)
class Witness:
    """A point where a predicate fails, with the amount ``lhs - rhs`` > 0.

    ``kind`` is "violation" for the inequality itself, "negative_value" when
    an MT candidate dips below zero at ``x``, and "domain_failure" when the
    function is undefined at ``x`` (margin is then infinite).
    """

    x: float
    y: Optional[float]
    t: Optional[float]
    margin: float
    kind: str = "violation"

    def __post_init__(self):
        if not self.margin > 0:
            raise ValueError("witness margin must be positive")


@dataclass(frozen=True)
class Verdict:
    """Outcome of a sampled class check.

    ``lhs``/``rhs`` are the two sides at the sampled point of least slack,
    so ``rhs - lhs`` is the smallest margin seen (negative on failure).
    """

    predicate: str
    status: str
    witness: Optional[Witness] = None
    lhs: float = math.nan
    rhs: float = math.nan
    evaluations: int = 0
    undefined_at: Optional[float] = None
    seed: int = 0

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.status == HOLDS


def violation_threshold(rhs):
    return REL_TOL * (1.0 + np.abs(rhs))


def _clip(points, a, b):
    return np.clip(points, a, b)


def pointwise_sides(pred: str, f: FunctionSpec, g: Optional[FunctionSpec],
                    x, y, t=None, fx=None, fy=None):
    """Vectorised ``(lhs, rhs)`` of predicate ``pred`` at the given coordinates.

    ``fx``/``fy`` may carry precomputed values of ``f`` at ``x``/``y``.  The
    caller is responsible for NaN (undefined) entries.
    """
    a, b = f.domain.a, f.domain.b
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    fx = f.values(x) if fx is None else fx
    fy = f.values(y) if fy is None else fy
    if pred == "so":
        if g is None:
            raise ValueError("similarly-ordered check needs two functions")
        prod = (fx - fy) * (g.values(x) - g.values(y))
        return -prod, np.zeros_like(prod)
    if pred == "midpoint":
        return f.values(_clip(0.5 * (x + y), a, b)), 0.5 * (fx + fy)
    t = np.asarray(t, dtype=float)
    lhs = f.values(_clip(t * x + (1.0 - t) * y, a, b))
    if pred == "convex":
        return lhs, t * fx + (1.0 - t) * fy
    if pred == "mt":
        # lam = t / (2 sqrt(t(1-t))), mu = (1-t) / (2 sqrt(t(1-t)))
        s = 1.0 - t
        return lhs, (t * fx + s * fy) / (2.0 * np.sqrt(t * s))
    raise ValueError(f"unknown predicate {pred!r}; expected one of {sorted(PREDICATES)}")


def select_witness_index(scores: np.ndarray, x, y, t) -> int:
    """Index of the largest score; ties go to the lexicographically smallest point.

    Scores within a few ulps of the maximum count as tied, so mirror-image
    points (x, y, t) and (y, x, 1 - t) resolve the same way regardless of
    rounding in either evaluation.
    """
    best = np.max(scores)
    idx = np.flatnonzero(scores >= best - TIE_ULPS * np.spacing(abs(best)))
    if idx.size == 1:
        return int(idx[0])
    keys = [x[idx], y[idx]] if t is None else [x[idx], y[idx], t[idx]]
    order = np.lexsort(tuple(reversed(keys)))
    return int(idx[order[0]])


def _run_check(pred: str, f: FunctionSpec, g: Optional[FunctionSpec],
               plan: SamplePlan, t_lo: float = 0.0, t_hi: float = 1.0,
               nonnegative: bool = False) -> Verdict:
    a, b = f.domain.a, f.domain.b
    if g is not None and g.domain != f.domain:
        raise DomainError("functions must share a domain")
    if PREDICATES[pred] == 3:
        x, y, t = plan.triples(a, b, t_lo, t_hi)
    else:
        (x, y), t = plan.pairs(a, b), None
    # grid coordinates repeat the same base points, so evaluate those once
    n, dims = plan.grid_points, PREDICATES[pred]
    n_grid = n ** dims
    base = f.values(np.linspace(a, b, n))
    inner = n ** (dims - 2)
    fx = np.concatenate([np.repeat(base, n * inner), f.values(x[n_grid:])])
    fy = np.concatenate([np.tile(np.repeat(base, inner), n), f.values(y[n_grid:])])
    lhs, rhs = pointwise_sides(pred, f, g, x, y, t, fx, fy)
    # base grid + random x, y + one combination point (so: g at x and y instead)
    evaluations = n + 2 * plan.random_samples + (2 * x.size if pred == "so" else x.size)

    excess = lhs - rhs
    bad = np.isnan(excess)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        loc = _undefined_location(f, g, x[i], y[i], None if t is None else t[i])
        return Verdict(pred, UNDEFINED_ENCOUNTERED, None, evaluations=evaluations,
                       undefined_at=loc, seed=plan.seed)

    worst = select_witness_index(excess, x, y, t)
    candidates = []
    violating = excess > violation_threshold(rhs)
    if violating.any():
        scores = np.where(violating, excess, -np.inf)
        i = select_witness_index(scores, x, y, t)
        candidates.append(Witness(float(x[i]), float(y[i]),
                                  None if t is None else float(t[i]),
                                  float(excess[i])))

    # a negative value breaks the class definition before any inequality
    # does, so it takes precedence over a larger inequality violation
    if nonnegative:
        pts = np.concatenate([x, y])
        vals = np.concatenate([fx, fy])
        if (vals < 0).any():
            j = int(np.argmin(vals))
            candidates = [Witness(float(pts[j]), None, None, float(-vals[j]),
                                  kind="negative_value")]

    witness = candidates[0] if candidates else None
    return Verdict(pred, FAILS if witness else HOLDS, witness,
                   lhs=float(lhs[worst]), rhs=float(rhs[worst]),
                   evaluations=evaluations, seed=plan.seed)


def _undefined_location(f, g, x, y, t) -> float:
    a, b = f.domain.a, f.domain.b
    points = [x, y]
    if t is not None:
        points.append(float(np.clip(t * x + (1 - t) * y, a, b)))
    else:
        points.append(float(np.clip(0.5 * (x + y), a, b)))
    for fn in (f, g):
        if fn is None:
            continue
        for p in points:
            if math.isnan(fn(p)):
                return float(p)
    return float(x)


def check_mt_membership(f: FunctionSpec, plan: SamplePlan = SamplePlan()) -> Verdict:
    """Sampled test of nonnegativity plus the MT inequality over t in the open interval."""
    return _run_check("mt", f, None, plan, plan.t_margin, 1.0 - plan.t_margin,
                      nonnegative=True)


def check_convexity(f: FunctionSpec, plan: SamplePlan = SamplePlan()) -> Verdict:
    return _run_check("convex", f, None, plan, 0.0, 1.0)


def check_midpoint_convexity(f: FunctionSpec, plan: SamplePlan = SamplePlan()) -> Verdict:
    return _run_check("midpoint", f, None, plan)


def check_similarly_ordered(f: FunctionSpec, g: FunctionSpec,
                            plan: SamplePlan = SamplePlan()) -> Verdict:
    """Test ``(f(x) - f(y)) * (g(x) - g(y)) >= 0`` over sampled pairs."""
    return _run_check("so", f, g, plan)


def check(pred: str, f: FunctionSpec, g: Optional[FunctionSpec] = None,
          plan: SamplePlan = SamplePlan()) -> Verdict:
    """Dispatch by predicate id ("convex", "midpoint", "mt", "so")."""
    if pred == "mt":
        return check_mt_membership(f, plan)
    if pred == "convex":
        return check_convexity(f, plan)
    if pred == "midpoint":
        return check_midpoint_convexity(f, plan)
    if pred == "so":
        if g is None:
            raise ValueError("similarly-ordered check needs two functions")
        return check_similarly_ordered(f, g, plan)
    raise ValueError(f"unknown predicate {pred!r}; expected one of {sorted(PREDICATES)}")
