import math

import pytest
from scipy.optimize import minimize_scalar
from hypothesis import given, settings, strategies as st

from mtconvex.classes import Witness, violation_threshold
from mtconvex.expr import FunctionSpec
from mtconvex.falsify import (
    SearchBudget, falsify_pointwise, golden_section_max, pointwise_violation,
    refine_witness, scalar_sides,
)

S = FunctionSpec.from_text
# the MT margin along (0, 1, t) for sqrt is sqrt(1-t) (1 - 1/(2 sqrt t)); its
# maximiser solves t^{3/2} = 1/2, i.e. t = 2^{-2/3}, with value (1-t)^{3/2}
T_STAR = 2 ** (-2 / 3)
SQRT_MAX = (1 - T_STAR) ** 1.5


def test_closed_form_against_optimizer():
    res = minimize_scalar(lambda t: -math.sqrt(1 - t) * (1 - 0.5 / math.sqrt(t)),
                          bounds=(0.3, 0.99), method="bounded", options={"xatol": 1e-10})
    assert res.x == pytest.approx(T_STAR, abs=1e-6)
    assert -res.fun == pytest.approx(SQRT_MAX, abs=1e-12)
    assert SQRT_MAX == pytest.approx(0.22510, abs=1e-5)


class TestBudget:
    def test_minimum_coarse(self):
        with pytest.raises(ValueError):
            SearchBudget(coarse_evals=26)
        SearchBudget(coarse_evals=27)


class TestFalsifyExamples:
    def test_sqrt_mt(self):
        w = falsify_pointwise("mt", S("sqrt(x)", 0, 1), SearchBudget(1000))
        assert w is not None and w.kind == "violation"
        assert w.margin >= 0.20
        assert (w.x, w.y) == (0.0, 1.0)
        # refinement reaches the true maximum, above the t = 1/2 value
        assert w.margin == pytest.approx(SQRT_MAX, abs=1e-9)
        assert w.t == pytest.approx(T_STAR, abs=1e-5)
        assert SQRT_MAX > math.sqrt(0.5) - 0.5

    def test_square_mt_absent(self):
        assert falsify_pointwise("mt", S("x^2", 0, 1), SearchBudget(10_000)) is None

    def test_sine_convexity(self):
        w = falsify_pointwise("convex", S("sin(x)", 0, math.pi), SearchBudget(1000))
        assert w is not None and w.margin >= 0.9

    def test_domain_failure_is_witness(self):
        w = falsify_pointwise("convex", S("sqrt(abs(x) - 0.5)", -1, 1), SearchBudget(1000))
        assert w.kind == "domain_failure" and w.margin == math.inf

    def test_negative_value_for_mt(self):
        w = falsify_pointwise("mt", S("x - 0.5", 0, 1), SearchBudget(1000))
        assert w.kind == "negative_value" and w.margin == pytest.approx(0.5)

    def test_similarly_ordered(self):
        w = falsify_pointwise("so", S("x", 0, 1), SearchBudget(100), g=S("1-x", 0, 1))
        assert w.margin == pytest.approx(1.0)

    def test_unknown_predicate(self):
        with pytest.raises(ValueError):
            falsify_pointwise("concave", S("x", 0, 1))


class TestRefine:
    def test_sqrt_from_interior_start(self):
        f = S("sqrt(x)", 0, 1)
        start = pointwise_violation("mt", f, None, 0.1, 0.9, 0.5)
        assert start > 0
        w = refine_witness("mt", f, Witness(0.1, 0.9, 0.5, start), iters=10)
        assert w.margin > start
        assert w.margin >= math.sqrt(0.5) - 0.5 - 1e-9

    def test_optimal_witness_is_fixed_point(self):
        f = S("sqrt(x)", 0, 1)
        w0 = Witness(0.0, 1.0, T_STAR, SQRT_MAX)
        w1 = refine_witness("mt", f, w0)
        assert w1.margin == pytest.approx(w0.margin, abs=1e-12)
        assert (w1.x, w1.y) == (0.0, 1.0)
        assert w1.t == pytest.approx(T_STAR, abs=1e-5)

    def test_zero_margin_rejected(self):
        # a zero-margin witness cannot even be constructed
        with pytest.raises(ValueError):
            refine_witness("mt", S("1", 0, 1), Witness(0.0, 1.0, 0.5, 0.0))

    def test_zero_iterations_returns_input(self):
        f = S("sqrt(x)", 0, 1)
        w = Witness(0.1, 0.9, 0.5, pointwise_violation("mt", f, None, 0.1, 0.9, 0.5))
        assert refine_witness("mt", f, w, iters=0) is w

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0, 1), st.floats(0, 1), st.floats(0.01, 0.99), st.integers(0, 4))
    def test_monotone(self, x, y, t, iters):
        f = S("sqrt(x) + 0.1*sin(7*x)", 0, 1)
        m = pointwise_violation("mt", f, None, x, y, t)
        if not m > 0:
            return
        w = refine_witness("mt", f, Witness(x, y, t, m), iters=iters)
        assert w.margin >= m

    def test_stays_in_bounds(self):
        f = S("sqrt(x)", 0, 1)
        w = refine_witness("mt", f, Witness(0.2, 0.7, 0.5, pointwise_violation("mt", f, None, 0.2, 0.7, 0.5)))
        assert 0 <= w.x <= 1 and 0 <= w.y <= 1 and 1e-6 <= w.t <= 1 - 1e-6


class TestProperties:
    @pytest.mark.parametrize("pred, src, a, b", [
        ("mt", "sqrt(x)", 0, 1), ("convex", "sin(x)", 0, math.pi), ("midpoint", "log(x)", 1, 5),
        ("mt", "x^0.25 + 1", 0, 2), ("convex", "-(x^2)", -1, 1),
    ])
    def test_soundness(self, pred, src, a, b):
        f = S(src, a, b)
        w = falsify_pointwise(pred, f, SearchBudget(2000, seed=5))
        assert w is not None and w.kind == "violation"
        lhs, rhs = scalar_sides(pred, f, None, w.x, w.y, w.t)
        assert lhs - rhs > violation_threshold(rhs)
        assert lhs - rhs == pytest.approx(w.margin, rel=1e-12)

    @pytest.mark.parametrize("seed", [0, 1, 12345])
    def test_determinism(self, seed):
        f = S("x^0.3", 0, 2)
        b = SearchBudget(500, 3, seed)
        assert falsify_pointwise("mt", f, b) == falsify_pointwise("mt", f, b)

    def test_determinism_of_absence(self):
        b = SearchBudget(800, seed=9)
        assert falsify_pointwise("convex", S("exp(x)", 0, 1), b) is None
        assert falsify_pointwise("convex", S("exp(x)", 0, 1), b) is None


class TestGoldenSection:
    def test_interior_max(self):
        x, v = golden_section_max(lambda u: -(u - 0.3) ** 2, 0, 1)
        assert x == pytest.approx(0.3, abs=1e-6)
        assert v == pytest.approx(0.0, abs=1e-12)

    def test_endpoint_max(self):
        assert golden_section_max(lambda u: u, 0, 2) == (2, 2)

    def test_nan_treated_as_minus_infinity(self):
        x, _ = golden_section_max(lambda u: math.nan if u > 0.5 else u, 0, 1)
        assert x == pytest.approx(0.5, abs=1e-6)
