import io
import json
import math
import subprocess
import sys

import pytest

from mtconvex.classes import SamplePlan, check_mt_membership
from mtconvex.cli import (
    EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, FalsifyOutcome, emit_report, run,
)
from mtconvex.expr import FunctionSpec
from mtconvex.theorems import verify_hadamard_left, verify_midpoint_pi

S = FunctionSpec.from_text
FAST = ["--grid", "9", "--rand", "64"]


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def machine(*argv):
    code, out, err = call(*argv, "--format", "machine")
    return code, json.loads(out), err


class TestRunExamples:
    def test_check_square(self):
        code, rows, _ = machine("check", "--class", "mt", "--fn", "x^2", "--on", "0", "1")
        assert code == EXIT_OK
        assert rows[0]["class_id"] == "mt" and rows[0]["status"] == "holds_on_samples"

    def test_verify_midpoint_pi(self):
        code, rows, _ = machine("verify", "--theorem", "midpoint_pi", "--fn", "1", "--on", "0", "1")
        assert code == EXIT_OK
        assert rows[0]["lhs"] == math.pi / 2 and rows[0]["rhs"] == 2.0
        assert rows[0]["status"] == "satisfied"

    def test_falsify_sqrt(self):
        code, rows, _ = machine("falsify", "--class", "mt", "--fn", "sqrt(x)", "--on", "0", "1")
        assert code == EXIT_VIOLATION
        w = rows[0]["witness"]
        assert (w["x"], w["y"]) == (0.0, 1.0)
        assert w["margin"] >= math.sqrt(0.5) - 0.5
        assert rows[0]["status"] == "witness_found"

    def test_falsify_square_no_witness(self):
        code, rows, _ = machine("falsify", "--class", "mt", "--fn", "x^2", "--on", "0", "1",
                                "--budget", "1000")
        assert code == EXIT_OK and rows[0]["witness"] is None

    def test_constant_endpoint(self):
        code, rows, _ = machine("check", "--class", "convex", "--fn", "sin(x)", "--on", "0", "pi",
                                *FAST)
        assert code == EXIT_VIOLATION
        assert rows[0]["witness"]["y"] == math.pi


class TestExitCodes:
    def test_parse_error(self):
        code, _, err = call("check", "--class", "mt", "--fn", "x +", "--on", "0", "1")
        assert code == EXIT_USAGE and "offset 3" in err

    def test_missing_fn(self):
        assert call("check", "--class", "mt", "--on", "0", "1")[0] == EXIT_USAGE

    def test_bad_interval(self):
        assert call("check", "--class", "mt", "--fn", "x", "--on", "1", "0")[0] == EXIT_USAGE
        assert call("check", "--class", "mt", "--fn", "x", "--on", "0", "x")[0] == EXIT_USAGE

    def test_unknown_subcommand(self):
        assert call("frobnicate")[0] == EXIT_USAGE

    def test_so_needs_gn(self):
        assert call("check", "--class", "so", "--fn", "x", "--on", "0", "1")[0] == EXIT_USAGE
        assert call("verify", "--theorem", "product_mu", "--fn", "x", "--on", "0", "1")[0] == EXIT_USAGE

    def test_undefined_inside_domain(self):
        code, _, err = call("verify", "--theorem", "hh_left", "--fn", "1/(x-0.5)", "--on", "0", "1")
        assert code == EXIT_NUMERICAL and "0.5" in err

    def test_undefined_endpoint(self):
        assert call("verify", "--theorem", "hh_left", "--fn", "1/x", "--on", "0", "1")[0] == EXIT_NUMERICAL

    def test_undefined_in_check(self):
        code, _, err = call("check", "--class", "mt", "--fn", "sqrt(abs(x) - 0.5)",
                            "--on", "-1", "1", *FAST)
        assert code == EXIT_NUMERICAL and "undefined" in err

    def test_violated_theorem(self):
        code, rows, _ = machine("verify", "--theorem", "hh_left", "--fn=-(x^2)", "--on", "0", "1")
        assert code == EXIT_VIOLATION and rows[0]["status"] == "violated"

    def test_so_product_not_similarly_ordered(self):
        code, rows, err = machine("verify", "--theorem", "so_product", "--fn", "x", "--gn", "1-x",
                                  "--on", "0", "1", *FAST)
        assert code == EXIT_VIOLATION and rows == [] and "similarly ordered" in err

    def test_verify_all_single(self):
        code, rows, _ = machine("verify", "--all", "--fn", "x^2", "--on", "0", "1", *FAST)
        assert code == EXIT_OK
        assert [r["theorem_id"] for r in rows] == ["hh_left", "hh_right", "tau_bound", "midpoint_pi"]

    def test_verify_all_pair(self):
        code, rows, _ = machine("verify", "--all", "--fn", "x^2", "--gn", "x", "--on", "0", "1", *FAST)
        assert code == EXIT_OK and len(rows) == 8

    def test_help(self):
        assert call("--help")[0] == EXIT_OK


class TestEmit:
    def test_empty(self):
        assert emit_report([], "machine") == "[]\n"
        assert json.loads(emit_report([], "machine")) == []
        assert emit_report([], "human") == "no reports\n"

    def test_satisfied_machine_object(self):
        r = verify_hadamard_left(S("exp(x)", 0, 1))
        obj = json.loads(emit_report([r], "machine"))[0]
        assert list(obj) == ["theorem_id", "lhs", "rhs", "margin", "lhs_error", "rhs_error",
                             "status", "witness", "evals", "seed"]
        assert obj["status"] == "satisfied"
        # bit-exact round trip
        for key in ("lhs", "rhs", "margin", "lhs_error", "rhs_error"):
            assert obj[key].hex() == getattr(r, key).hex()

    def test_witness_round_trip(self):
        v = check_mt_membership(S("x^0.3", 0, 2), SamplePlan(9, 64, 1))
        obj = json.loads(emit_report([v], "machine"))[0]
        assert list(obj["witness"]) == ["x", "y", "t", "margin", "kind"]
        for key in ("x", "y", "t", "margin"):
            assert obj["witness"][key] == getattr(v.witness, key)
        assert obj["lhs"] == v.lhs and obj["rhs"] == v.rhs

    def test_awkward_values_round_trip(self):
        r = verify_midpoint_pi(S("x^2 + 1e-300", 0, 1e-3))
        obj = json.loads(emit_report([r], "machine"))[0]
        assert obj["lhs"] == r.lhs and obj["rhs"] == r.rhs and obj["margin"] == r.margin

    def test_human_violation_row_shows_witness(self):
        v = check_mt_membership(S("sqrt(x)", 0, 1), SamplePlan(9, 64, 1))
        text = emit_report([v], "human")
        lines = text.splitlines()
        assert lines[0].split()[:2] == ["id", "lhs"]
        assert "fails" in lines[2] and "x=0.0" in lines[2] and "y=1.0" in lines[2]

    def test_human_and_machine_same_numbers(self):
        r = verify_hadamard_left(S("x^2", 0, 1))
        human = emit_report([r], "human")
        obj = json.loads(emit_report([r], "machine"))[0]
        assert repr(obj["lhs"]) in human or format(obj["lhs"], ".17g") in human

    def test_falsify_outcome_without_witness(self):
        o = FalsifyOutcome("mt", None, math.nan, math.nan, 100, 0)
        obj = json.loads(emit_report([o], "machine"))[0]
        assert obj["status"] == "no_witness" and obj["witness"] is None


class TestDeterminism:
    def test_demo_byte_identical(self):
        argv = ["demo", "--format", "machine", "--seed", "7", *FAST]
        assert call(*argv)[1] == call(*argv)[1]

    def test_demo_all_ok(self):
        code, rows, _ = machine("demo", *FAST)
        assert code == EXIT_OK
        by_id = {}
        for r in rows:
            key = r.get("theorem_id") or r.get("class_id") or r.get("check_id")
            by_id.setdefault(key, []).append(r)
        for r in by_id["moment_sqrt_t_one_minus_t"] + by_id["tau_bound"]:
            assert r["status"] == "satisfied"

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "mtconvex", "verify", "--theorem",
                               "midpoint_pi", "--fn", "1", "--on", "0", "1"],
                              capture_output=True, text=True)
        assert proc.returncode == 0 and "midpoint_pi" in proc.stdout
