"""Both sides of the Hadamard-type inequalities, with signed margins.

Each ``verify_*`` returns a :class:`TheoremReport` whose ``margin`` is
``rhs - lhs``; a nonnegative margin means the inequality holds for that
input.  Quadrature errors on each side are carried along so that a tiny
negative margin caused by integration noise is not reported as a violation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .classes import SamplePlan, Witness, check_convexity, check_mt_membership, check_similarly_ordered
from .expr import DomainError, FunctionSpec
from .quad import (DEFAULT_TOL, QuadResult, UndefinedEvaluationError, Weight, integrate,
                   integrate_weighted)

__all__ = [
    "TheoremReport", "ProductTerms", "NotSimilarlyOrderedError",
    "SATISFIED", "VIOLATED", "INCONCLUSIVE", "THEOREM_IDS",
    "product_terms", "classify",
    "verify_hadamard_left", "verify_tau_bound", "verify_midpoint_pi",
    "verify_product_mu", "verify_so_product", "verify_pachpatte",
    "verify_pachpatte_midpoint", "verify_classical_hh", "verify",
]

SATISFIED = "satisfied"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"

THEOREM_IDS = ("hh_left", "hh_right", "tau_bound", "midpoint_pi",
               "product_mu", "so_product", "pachpatte", "pachpatte_midpoint")
PAIR_THEOREMS = frozenset({"product_mu", "so_product", "pachpatte", "pachpatte_midpoint"})


class NotSimilarlyOrderedError(ValueError):
    def __init__(self, witness: Witness):
        self.witness = witness
        super().__init__(
            f"functions are not similarly ordered: witness x={witness.x!r}, y={witness.y!r}")


@dataclass(frozen=True)
class ProductTerms:
    M: float  # f(a)g(a) + f(b)g(b)
    N: float  # f(a)g(b) + f(b)g(a)


def product_terms(f: FunctionSpec, g: FunctionSpec) -> ProductTerms:
    a, b = f.domain.a, f.domain.b
    fa, fb, ga, gb = f(a), f(b), g(a), g(b)
    return ProductTerms(fa * ga + fb * gb, fa * gb + fb * ga)


@dataclass(frozen=True)
class TheoremReport:
    theorem_id: str
    lhs: float
    rhs: float
    margin: float
    lhs_error: float = 0.0
    rhs_error: float = 0.0
    status: str = SATISFIED
    evaluations: int = 0
    precondition: Optional[bool] = None  # None when not checked
    warnings: tuple[str, ...] = field(default=())

    @property
    def satisfied(self) -> bool:
        return self.status == SATISFIED


def classify(margin: float, error: float, converged: bool = True) -> str:
    """Status of a margin given the combined error of both sides.

    A margin that is negative by no more than the error is not a violation.
    When the quadrature did not converge and the error swamps the margin,
    the result is inconclusive.
    """
    if not converged and abs(margin) <= error:
        return INCONCLUSIVE
    return SATISFIED if margin >= -error else VIOLATED


def _report(theorem_id: str, lhs: float, rhs: float, lhs_error: float = 0.0,
            rhs_error: float = 0.0, quads: tuple[QuadResult, ...] = (),
            evaluations: int = 0, precondition=None, warnings=()) -> TheoremReport:
    margin = rhs - lhs
    converged = all(q.converged for q in quads)
    evaluations += sum(q.evaluations for q in quads)
    status = classify(margin, lhs_error + rhs_error, converged)
    return TheoremReport(theorem_id, lhs, rhs, margin, lhs_error, rhs_error, status,
                         evaluations, precondition, tuple(warnings))


def _need_value(f: FunctionSpec, x: float) -> float:
    v = f(x)
    if math.isnan(v):
        raise UndefinedEvaluationError(x, f.text)
    return v


def _same_domain(f: FunctionSpec, g: FunctionSpec):
    if f.domain != g.domain:
        raise DomainError("f and g must share a domain")


def _precondition(kind: str, plan: Optional[SamplePlan], *fs: FunctionSpec):
    """Sampled hypothesis check; returns (ok, warnings).  Skipped when plan is None."""
    if plan is None:
        return None, ()
    warnings = []
    for f in fs:
        if kind == "mt":
            verdict = check_mt_membership(f, plan)
            what = "MT-convex"
        else:
            verdict = check_convexity(f, plan)
            grid = np.linspace(f.domain.a, f.domain.b, plan.grid_points)
            if (f.values(grid) < 0).any():
                warnings.append(f"{f.text} takes negative values on samples")
            what = "convex"
        if not verdict.holds:
            w = verdict.witness
            where = "" if w is None else f" (witness x={w.x!r}, y={w.y!r}, t={w.t!r})"
            warnings.append(f"{f.text} is not {what} on samples{where}")
    return not warnings, tuple(warnings)


def verify_hadamard_left(f: FunctionSpec, tol: float = DEFAULT_TOL,
                         plan: Optional[SamplePlan] = None) -> TheoremReport:
    """f(midpoint) <= mean value of f."""
    dom = f.domain
    q = integrate(f, tol)
    ok, warns = _precondition("mt", plan, f)
    return _report("hh_left", _need_value(f, dom.midpoint), q.value / dom.width,
                   0.0, q.abs_error_estimate / dom.width, (q,), 1, ok, warns)


def verify_tau_bound(f: FunctionSpec, tol: float = DEFAULT_TOL,
                     plan: Optional[SamplePlan] = None) -> TheoremReport:
    """(2/(b-a)) int tau f <= (f(a) + f(b))/2."""
    dom = f.domain
    q = integrate_weighted(f, Weight.TAU, tol).scaled(2.0 / dom.width)
    rhs = 0.5 * (_need_value(f, dom.a) + _need_value(f, dom.b))
    ok, warns = _precondition("mt", plan, f)
    return _report("tau_bound", q.value, rhs, q.abs_error_estimate, 0.0, (q,), 2, ok, warns)


def verify_midpoint_pi(f: FunctionSpec, tol: float = DEFAULT_TOL,
                       plan: Optional[SamplePlan] = None) -> TheoremReport:
    """(pi/2) f(midpoint) <= f(a) + f(b); pointwise, so both errors are zero."""
    dom = f.domain
    lhs = 0.5 * math.pi * _need_value(f, dom.midpoint)
    rhs = _need_value(f, dom.a) + _need_value(f, dom.b)
    ok, warns = _precondition("mt", plan, f)
    return _report("midpoint_pi", lhs, rhs, evaluations=3, precondition=ok, warnings=warns)


def _mu_mean(f: FunctionSpec, g: FunctionSpec, tol: float) -> QuadResult:
    return integrate_weighted(f.times(g), Weight.MU, tol).scaled(1.0 / f.domain.width)


def verify_product_mu(f: FunctionSpec, g: FunctionSpec, tol: float = DEFAULT_TOL,
                      plan: Optional[SamplePlan] = None) -> TheoremReport:
    """(1/(b-a)) int mu f g <= M/12 + N/24."""
    _same_domain(f, g)
    q = _mu_mean(f, g, tol)
    pt = product_terms(f, g)
    ok, warns = _precondition("mt", plan, f, g)
    return _report("product_mu", q.value, pt.M / 12.0 + pt.N / 24.0,
                   q.abs_error_estimate, 0.0, (q,), 4, ok, warns)


def verify_so_product(f: FunctionSpec, g: FunctionSpec, plan: SamplePlan = SamplePlan(),
                      tol: float = DEFAULT_TOL) -> TheoremReport:
    """(1/(b-a)) int mu f g <= M/8 for similarly ordered f, g.

    Raises :class:`NotSimilarlyOrderedError` when sampling finds a pair
    ``(x, y)`` with ``(f(x)-f(y))(g(x)-g(y)) < 0``.
    """
    _same_domain(f, g)
    so = check_similarly_ordered(f, g, plan)
    if so.witness is not None:
        raise NotSimilarlyOrderedError(so.witness)
    if not so.holds:
        raise UndefinedEvaluationError(so.undefined_at, "f or g")
    q = _mu_mean(f, g, tol)
    pt = product_terms(f, g)
    ok, warns = _precondition("mt", plan, f, g)
    return _report("so_product", q.value, pt.M / 8.0, q.abs_error_estimate, 0.0,
                   (q,), 4 + so.evaluations, ok, warns)


def verify_pachpatte(f: FunctionSpec, g: FunctionSpec, tol: float = DEFAULT_TOL,
                     plan: Optional[SamplePlan] = None) -> TheoremReport:
    """(1/(b-a)) int f g <= M/3 + N/6."""
    _same_domain(f, g)
    q = integrate(f.times(g), tol).scaled(1.0 / f.domain.width)
    pt = product_terms(f, g)
    ok, warns = _precondition("convex", plan, f, g)
    return _report("pachpatte", q.value, pt.M / 3.0 + pt.N / 6.0,
                   q.abs_error_estimate, 0.0, (q,), 4, ok, warns)


def verify_pachpatte_midpoint(f: FunctionSpec, g: FunctionSpec, tol: float = DEFAULT_TOL,
                              plan: Optional[SamplePlan] = None) -> TheoremReport:
    """2 f(m) g(m) <= (1/(b-a)) int f g + M/6 + N/3."""
    _same_domain(f, g)
    m = f.domain.midpoint
    q = integrate(f.times(g), tol).scaled(1.0 / f.domain.width)
    pt = product_terms(f, g)
    ok, warns = _precondition("convex", plan, f, g)
    return _report("pachpatte_midpoint", 2.0 * _need_value(f, m) * _need_value(g, m),
                   q.value + pt.M / 6.0 + pt.N / 3.0, 0.0, q.abs_error_estimate,
                   (q,), 6, ok, warns)


def verify_classical_hh(f: FunctionSpec, tol: float = DEFAULT_TOL,
                        plan: Optional[SamplePlan] = None) -> tuple[TheoremReport, TheoremReport]:
    """The two halves of the classical Hadamard inequality for convex f."""
    dom = f.domain
    q = integrate(f, tol)
    mean, err = q.value / dom.width, q.abs_error_estimate / dom.width
    ok, warns = _precondition("convex", plan, f)
    left = _report("hh_left", _need_value(f, dom.midpoint), mean, 0.0, err, (q,), 1, ok, warns)
    right = _report("hh_right", mean, 0.5 * (_need_value(f, dom.a) + _need_value(f, dom.b)),
                    err, 0.0, (q,), 2, ok, warns)
    return left, right


def verify(theorem_id: str, f: FunctionSpec, g: Optional[FunctionSpec] = None,
           tol: float = DEFAULT_TOL, plan: Optional[SamplePlan] = None) -> TheoremReport:
    """Dispatch by theorem id.  ``hh_right`` runs the classical right half."""
    if theorem_id in PAIR_THEOREMS and g is None:
        raise ValueError(f"{theorem_id} needs a second function")
    if theorem_id == "hh_left":
        return verify_hadamard_left(f, tol, plan)
    if theorem_id == "hh_right":
        return verify_classical_hh(f, tol, plan)[1]
    if theorem_id == "tau_bound":
        return verify_tau_bound(f, tol, plan)
    if theorem_id == "midpoint_pi":
        return verify_midpoint_pi(f, tol, plan)
    if theorem_id == "product_mu":
        return verify_product_mu(f, g, tol, plan)
    if theorem_id == "so_product":
        return verify_so_product(f, g, plan or SamplePlan(), tol)
    if theorem_id == "pachpatte":
        return verify_pachpatte(f, g, tol, plan)
    if theorem_id == "pachpatte_midpoint":
        return verify_pachpatte_midpoint(f, g, tol, plan)
    raise ValueError(f"unknown theorem {theorem_id!r}; expected one of {THEOREM_IDS}")
