"""Numerical tests for MT-convexity and Hadamard-type integral inequalities."""

from .expr import (DomainError, FunctionSpec, Interval, ParseError, parse, evaluate,
                   evaluate_batch, to_text)
from .classes import (SamplePlan, Verdict, Witness, mt_coefficients, amgm_gap,
                      check_mt_membership, check_convexity, check_midpoint_convexity,
                      check_similarly_ordered)
from .quad import QuadResult, Weight, integrate, integrate_weighted, tau_substitution_check

__version__ = "0.1.0"
