"""Command-line front end.

    mtconvex check   --class mt --fn "x^2" --on 0 1
    mtconvex verify  --theorem tau_bound --fn "x^2" --on 0 1
    mtconvex verify  --all --fn "x" --gn "x^2" --on 0 1
    mtconvex falsify --class mt --fn "sqrt(x)" --on 0 1 --budget 1000
    mtconvex demo    --format machine --seed 7

Exit codes: 0 all satisfied / holds / no witness, 1 violation or witness
found, 2 usage or parse error, 3 numerical failure (non-convergence,
undefined evaluation).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional, Sequence, TextIO

from . import classes, quad, theorems
from .classes import SamplePlan, Verdict, Witness
from .expr import BinOp, DomainError, Func, FunctionSpec, Neg, ParseError, Var, evaluate, parse
from .falsify import SearchBudget, falsify_pointwise, scalar_sides
from .quad import UndefinedEvaluationError
from .theorems import TheoremReport

__all__ = ["run", "main", "emit_report", "FalsifyOutcome", "IdentityCheck", "demo_reports"]

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3

SINGLE_THEOREMS = ("hh_left", "hh_right", "tau_bound", "midpoint_pi")


@dataclass(frozen=True)
class FalsifyOutcome:
    class_id: str
    witness: Optional[Witness]
    lhs: float
    rhs: float
    evaluations: int
    seed: int

    @property
    def status(self) -> str:
        if self.witness is None:
            return "no_witness"
        return "domain_failure" if self.witness.kind == "domain_failure" else "witness_found"


@dataclass(frozen=True)
class IdentityCheck:
    """A computed quantity against its closed form."""

    check_id: str
    computed: float
    exact: float
    error: float
    tolerance: float

    @property
    def status(self) -> str:
        return "satisfied" if abs(self.exact - self.computed) <= self.tolerance else "violated"


# ---------------------------------------------------------------------------
# Serialisation

def _num(v) -> str:
    if v is None:
        return "null"
    v = float(v)
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    s = format(v, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def _witness_fields(w: Optional[Witness]):
    if w is None:
        return None
    return [("x", w.x), ("y", w.y), ("t", w.t), ("margin", w.margin), ("kind", w.kind)]


def _fields(item) -> list[tuple[str, object]]:
    """Report fields in their fixed output order."""
    if isinstance(item, TheoremReport):
        return [("theorem_id", item.theorem_id), ("lhs", item.lhs), ("rhs", item.rhs),
                ("margin", item.margin), ("lhs_error", item.lhs_error),
                ("rhs_error", item.rhs_error), ("status", item.status),
                ("witness", None), ("evals", item.evaluations), ("seed", None)]
    if isinstance(item, Verdict):
        return [("class_id", item.predicate), ("lhs", item.lhs), ("rhs", item.rhs),
                ("margin", item.margin), ("lhs_error", 0.0), ("rhs_error", 0.0),
                ("status", item.status), ("witness", _witness_fields(item.witness)),
                ("evals", item.evaluations), ("seed", item.seed)]
    if isinstance(item, FalsifyOutcome):
        return [("class_id", item.class_id), ("lhs", item.lhs), ("rhs", item.rhs),
                ("margin", item.rhs - item.lhs if item.witness else None),
                ("lhs_error", 0.0), ("rhs_error", 0.0), ("status", item.status),
                ("witness", _witness_fields(item.witness)),
                ("evals", item.evaluations), ("seed", item.seed)]
    if isinstance(item, IdentityCheck):
        return [("check_id", item.check_id), ("lhs", item.computed), ("rhs", item.exact),
                ("margin", item.exact - item.computed), ("lhs_error", item.error),
                ("rhs_error", 0.0), ("status", item.status), ("witness", None),
                ("evals", None), ("seed", None)]
    raise TypeError(f"cannot report {type(item).__name__}")


def _json_value(key, value) -> str:
    if value is None:
        return "null"
    if isinstance(value, list):
        return "{" + ", ".join(f"{json.dumps(k)}: {_json_value(k, v)}" for k, v in value) + "}"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (bool,)):
        return "true" if value else "false"
    if key in ("evals", "seed") and isinstance(value, int):
        return str(value)
    return _num(value)


def _human_value(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, str):
        return value
    if isinstance(value, list):
        coords = ", ".join(f"{k}={_num(v)}" for k, v in value if k in ("x", "y", "t") and v is not None)
        return f"({coords}) margin={_num(dict(value)['margin'])}"
    if isinstance(value, int) and not isinstance(value, bool):
        return str(value)
    return _num(value)


def emit_report(reports: Sequence, fmt: str = "human") -> str:
    """Render reports as a JSON array ("machine") or an aligned table ("human")."""
    if fmt == "machine":
        if not reports:
            return "[]\n"
        objs = []
        for item in reports:
            body = ", ".join(f"{json.dumps(k)}: {_json_value(k, v)}" for k, v in _fields(item))
            objs.append("  {" + body + "}")
        return "[\n" + ",\n".join(objs) + "\n]\n"
    if fmt != "human":
        raise ValueError(f"unknown format {fmt!r}")
    if not reports:
        return "no reports\n"
    header = ["id", "lhs", "rhs", "margin", "lhs_error", "rhs_error", "status", "witness"]
    rows = []
    for item in reports:
        fields = dict(_fields(item))
        ident = next(iter(_fields(item)))[1]
        rows.append([ident] + [_human_value(fields[k]) for k in header[1:]])
    widths = [max(len(r[i]) for r in rows + [header]) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(header, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Argument handling

class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _mentions_x(node) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, (Neg, Func)):
        return _mentions_x(node.arg)
    if isinstance(node, BinOp):
        return _mentions_x(node.left) or _mentions_x(node.right)
    return False


def _endpoint(text: str) -> float:
    node = parse(text)
    value = math.nan if _mentions_x(node) else evaluate(node, 0.0)
    if math.isnan(value):
        raise argparse.ArgumentTypeError(f"endpoint {text!r} is not a finite constant")
    return value


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--fn", help="function of x")
    common.add_argument("--gn", help="second function of x (product theorems, similarly ordered)")
    common.add_argument("--on", nargs=2, metavar=("A", "B"), default=None,
                        help="interval endpoints (constant expressions such as pi allowed)")
    common.add_argument("--tol", type=float, default=quad.DEFAULT_TOL)
    common.add_argument("--grid", type=int, default=64)
    common.add_argument("--rand", type=int, default=4096)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=10_000)
    common.add_argument("--refine", type=int, default=10, help="refinement iterations")
    common.add_argument("--format", choices=("human", "machine"), default="human")

    parser = _Parser(prog="mtconvex", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="sampled class membership")
    p.add_argument("--class", dest="cls", required=True, choices=sorted(classes.PREDICATES))

    p = sub.add_parser("verify", parents=[common], help="both sides of the inequalities")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--theorem", choices=theorems.THEOREM_IDS)
    which.add_argument("--all", action="store_true")

    p = sub.add_parser("falsify", parents=[common], help="counterexample search")
    p.add_argument("--class", dest="cls", required=True, choices=sorted(classes.PREDICATES))

    sub.add_parser("demo", parents=[common], help="run the built-in corpus and print margins")
    return parser


def _specs(args):
    if args.fn is None:
        raise _UsageError("--fn is required")
    if args.on is None:
        raise _UsageError("--on A B is required")
    try:
        a, b = (_endpoint(s) for s in args.on)
    except argparse.ArgumentTypeError as exc:
        raise _UsageError(str(exc))
    if not a < b:
        raise _UsageError(f"--on needs A < B, got {a!r} {b!r}")
    if not args.tol > 0:
        raise _UsageError("--tol must be positive")
    f = FunctionSpec.from_text(args.fn, a, b)
    g = FunctionSpec.from_text(args.gn, a, b) if args.gn is not None else None
    return f, g


def _plan(args) -> SamplePlan:
    try:
        return SamplePlan(args.grid, args.rand, args.seed)
    except ValueError as exc:
        raise _UsageError(str(exc))


def _falsify(cls: str, f, g, budget: SearchBudget) -> FalsifyOutcome:
    w = falsify_pointwise(cls, f, budget, g)
    lhs = rhs = math.nan
    if w is not None and w.kind == "violation":
        lhs, rhs = scalar_sides(cls, f, g, w.x, w.y, w.t)
    return FalsifyOutcome(cls, w, lhs, rhs, budget.coarse_evals, budget.seed)


def _cmd_check(args):
    f, g = _specs(args)
    if args.cls == "so" and g is None:
        raise _UsageError("--class so needs --gn")
    verdict = classes.check(args.cls, f, g, _plan(args))
    code = {classes.HOLDS: EXIT_OK, classes.FAILS: EXIT_VIOLATION}.get(verdict.status, EXIT_NUMERICAL)
    notes = []
    if verdict.undefined_at is not None:
        notes.append(f"undefined evaluation at x = {verdict.undefined_at!r}")
    return [verdict], code, notes


def _cmd_verify(args):
    f, g = _specs(args)
    plan = _plan(args)
    if args.all:
        ids = SINGLE_THEOREMS + (tuple(t for t in theorems.THEOREM_IDS if t in theorems.PAIR_THEOREMS)
                                 if g is not None else ())
    else:
        ids = (args.theorem,)
        if args.theorem in theorems.PAIR_THEOREMS and g is None:
            raise _UsageError(f"--theorem {args.theorem} needs --gn")
    reports, notes = [], []
    for tid in ids:
        try:
            reports.append(theorems.verify(tid, f, g, args.tol, plan))
        except theorems.NotSimilarlyOrderedError as exc:
            notes.append(f"{tid}: {exc}")
    for r in reports:
        notes.extend(f"{r.theorem_id}: warning: {w}" for w in r.warnings)
        if r.status == theorems.INCONCLUSIVE:
            notes.append(f"{r.theorem_id}: inconclusive, try a tighter --tol than {args.tol!r}")
    statuses = {r.status for r in reports}
    if theorems.INCONCLUSIVE in statuses:
        code = EXIT_NUMERICAL
    elif theorems.VIOLATED in statuses or len(reports) < len(ids):
        code = EXIT_VIOLATION
    else:
        code = EXIT_OK
    return reports, code, notes


def _cmd_falsify(args):
    f, g = _specs(args)
    if args.cls == "so" and g is None:
        raise _UsageError("--class so needs --gn")
    try:
        budget = SearchBudget(args.budget, args.refine, args.seed)
    except ValueError as exc:
        raise _UsageError(str(exc))
    outcome = _falsify(args.cls, f, g, budget)
    if outcome.witness is None:
        code = EXIT_OK
    elif outcome.witness.kind == "domain_failure":
        code = EXIT_NUMERICAL
    else:
        code = EXIT_VIOLATION
    return [outcome], code, []


# ---------------------------------------------------------------------------
# Demo corpus

def _moment(check_id: str, source: str, weight: quad.Weight, exact: float, tol: float):
    res = quad.integrate_weighted(FunctionSpec.from_text(source, 0, 1), weight, tol)
    return IdentityCheck(check_id, res.value, exact, res.abs_error_estimate, 1e-10)


def demo_reports(seed: int = 0, tol: float = quad.DEFAULT_TOL,
                 plan: Optional[SamplePlan] = None) -> list:
    """The built-in corpus: moments, equality cases, margin table, class checks,
    counterexample searches and the substitution identity."""
    plan = plan or SamplePlan(seed=seed)
    S = FunctionSpec.from_text
    one, x, x2 = S("1", 0, 1), S("x", 0, 1), S("x^2", 0, 1)
    out: list = [
        _moment("moment_sqrt_t_one_minus_t", "1", quad.Weight.SQRT_T_ONE_MINUS_T, math.pi / 8, tol),
        _moment("moment_t_one_minus_t", "1", quad.Weight.MU, 1 / 6, tol),
        _moment("moment_t_squared", "x^2", quad.Weight.NONE, 1 / 3, tol),
        theorems.verify_hadamard_left(one, tol),
        theorems.verify_pachpatte(one, one, tol),
        theorems.verify_pachpatte_midpoint(one, one, tol),
        theorems.verify_pachpatte(x, x, tol),
        theorems.verify_pachpatte_midpoint(x, x, tol),
        theorems.verify_tau_bound(one, tol),
        theorems.verify_tau_bound(x2, tol),
        theorems.verify_midpoint_pi(one, tol),
        theorems.verify_product_mu(x, x, tol),
        theorems.verify_product_mu(x, S("1-x", 0, 1), tol),
        theorems.verify_so_product(x, x2, plan, tol),
        *theorems.verify_classical_hh(S("exp(x)", 0, 1), tol),
        classes.check_mt_membership(x2, plan),
        classes.check_mt_membership(S("sqrt(x)", 0, 1), plan),
        classes.check_convexity(S("sin(x)", 0, math.pi), plan),
        _falsify("mt", S("sqrt(x)", 0, 1), None, SearchBudget(1000, seed=seed)),
        _falsify("mt", x2, None, SearchBudget(10_000, seed=seed)),
    ]
    for source in ("1", "x", "x^2", "exp(x)"):
        for a, b in ((0, 1), (3, 5)):
            diff = quad.tau_substitution_check(S(source, a, b), tol)
            out.append(IdentityCheck(f"tau_substitution[{source} on {a},{b}]", diff, 0.0, 0.0, 1e-9))
    return out


def _cmd_demo(args):
    plan = SamplePlan(args.grid, args.rand, args.seed)
    reports = demo_reports(args.seed, args.tol, plan)
    return reports, EXIT_OK, []


# ---------------------------------------------------------------------------

def run(argv: Sequence[str], out: TextIO = None, err: TextIO = None) -> int:
    """Run the CLI on ``argv`` and return the exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
        handler = {"check": _cmd_check, "verify": _cmd_verify,
                   "falsify": _cmd_falsify, "demo": _cmd_demo}[args.command]
        reports, code, notes = handler(args)
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    except _UsageError as exc:
        print(str(exc), file=err)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"mtconvex: parse error: {exc}", file=err)
        return EXIT_USAGE
    except (DomainError, UndefinedEvaluationError) as exc:
        print(f"mtconvex: numerical failure: {exc}", file=err)
        return EXIT_NUMERICAL
    out.write(emit_report(reports, args.format))
    for note in notes:
        print(note, file=err)
    return code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
