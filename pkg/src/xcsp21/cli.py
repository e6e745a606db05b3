"""Command-line front end: ``xcsp21 validate|convert|check|solve|stats``.

Exit status: 0 success, 1 negative result (invalid, unsatisfied, no
solution, false), 2 usage or I/O error, 3 load failure or hard error.
Results go to stdout and diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from collections import Counter
from pathlib import Path

from . import semantics
from .diagnostics import ERROR
from .document import Notation, load_instance, write_instance
from .errors import BudgetExceeded, LoadError, NotApplicable, XCSPError
from .model import InstanceType, format_cost
from .validate import ValidationReport, validate_competition, validate_structure

OK, NEGATIVE, USAGE, HARD = 0, 1, 2, 3

BUDGET_ENV = "XCSP21_BUDGET"


class _Exit(Exception):
    def __init__(self, code: int, message: str = ""):
        super().__init__(message)
        self.code = code
        self.message = message


class _Context:
    def __init__(self, args, stdout, stderr):
        self.args = args
        self.out = stdout
        self.err = stderr
        self.machine = args.format == "machine"

    def say(self, text: str = "") -> None:
        self.out.write(text + "\n")

    def note(self, text: str) -> None:
        if not self.args.quiet:
            self.err.write(text + "\n")

    def load(self, path, echo_warnings=True):
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise _Exit(USAGE, f"cannot read {path}: {exc.strerror or exc}") from None
        try:
            instance, warnings = load_instance(data)
        except LoadError as exc:
            for d in exc.diagnostics:
                if d.severity == ERROR or not self.args.quiet:
                    self.err.write(d.to_text() + "\n")
            raise _Exit(HARD, f"cannot load {path}") from None
        if echo_warnings:
            for d in warnings:
                self.note(d.to_text())
        return instance, warnings


def _format_assignment(assignment: dict) -> str:
    return " ".join(f"{k}={v}" for k, v in assignment.items())


_BINDING = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)=([+-]?\d+)\Z")


def parse_assignment(text: str) -> dict:
    """``"V0=2,V1=4"`` (commas and/or whitespace) -> ``{"V0": 2, "V1": 4}``."""
    out = {}
    for item in re.split(r"[,\s]+", text.strip()):
        if not item:
            continue
        m = _BINDING.match(item)
        if m is None:
            raise ValueError(f"malformed binding {item!r}; expected Name=integer")
        if m.group(1) in out:
            raise ValueError(f"variable {m.group(1)} is bound twice")
        out[m.group(1)] = int(m.group(2))
    return out


def _budget(args) -> int:
    if args.limit is not None:
        return args.limit
    raw = os.environ.get(BUDGET_ENV)
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise _Exit(USAGE, f"{BUDGET_ENV}={raw!r} is not an integer") from None
    return semantics.DEFAULT_BUDGET


# -- commands --------------------------------------------------------------------

def cmd_validate(ctx: _Context) -> int:
    args = ctx.args
    instance, load_warnings = ctx.load(args.path, echo_warnings=False)
    if args.strict_competition:
        report = validate_competition(instance, escalate_naming=args.escalate_naming)
    else:
        report = validate_structure(instance)
    # loader warnings belong to the report too
    report = ValidationReport(tuple(load_warnings) + report.diagnostics, report.strict_mode)
    if ctx.machine:
        ctx.out.write(report.to_json_lines())
    else:
        ctx.out.write(report.to_text())
    return OK if report.passed else NEGATIVE


def cmd_convert(ctx: _Context) -> int:
    args = ctx.args
    instance, _ = ctx.load(args.path)
    data = write_instance(instance, Notation(args.to))
    if args.output:
        try:
            Path(args.output).write_bytes(data)
        except OSError as exc:
            raise _Exit(USAGE, f"cannot write {args.output}: {exc.strerror or exc}") from None
    else:
        ctx.out.flush()
        buffer = getattr(ctx.out, "buffer", None)
        if buffer is not None:
            buffer.write(data)
            buffer.flush()
        else:
            ctx.out.write(data.decode("utf-8"))
    return OK


def cmd_check(ctx: _Context) -> int:
    args = ctx.args
    if args.assignment_file:
        try:
            text = Path(args.assignment_file).read_text(encoding="utf-8")
        except OSError as exc:
            raise _Exit(USAGE, f"cannot read {args.assignment_file}: {exc.strerror or exc}") from None
    else:
        text = args.assignment
    try:
        assignment = parse_assignment(text)
    except ValueError as exc:
        raise _Exit(USAGE, str(exc)) from None
    instance, _ = ctx.load(args.path)
    try:
        report = semantics.check_solution(instance, assignment)
    except NotApplicable as exc:
        raise _Exit(USAGE, str(exc)) from None
    except XCSPError as exc:
        raise _Exit(HARD, f"{exc.code}: {exc}") from None
    if ctx.machine:
        record = {"kind": report.kind.value, "satisfied": report.satisfied, "violated": list(report.violated)}
        if report.kind == InstanceType.WCSP:
            record["totalCost"] = format_cost(report.total_cost)
            record["consistent"] = report.consistent
            record["maximalCost"] = format_cost(instance.k)
        ctx.say(json.dumps(record, sort_keys=True))
    elif report.kind == InstanceType.WCSP:
        state = "consistent" if report.consistent else "inconsistent"
        ctx.say(f"cost {format_cost(report.total_cost)} ({state}, maximalCost {format_cost(instance.k)})")
    elif report.satisfied:
        ctx.say("SATISFIED")
    else:
        ctx.say("VIOLATED " + " ".join(report.violated))
    return OK if report.satisfied else NEGATIVE


def cmd_solve(ctx: _Context) -> int:
    args = ctx.args
    instance, _ = ctx.load(args.path)
    budget = _budget(args)
    quantified = instance.type.quantified
    if (args.mode == "qcsp") != quantified:
        raise _Exit(USAGE, f"mode {args.mode} does not apply to a {instance.type.value} instance")
    try:
        if args.mode == "qcsp":
            truth = semantics.eval_qcsp(instance, budget)
            ctx.say(json.dumps({"value": truth}) if ctx.machine else ("TRUE" if truth else "FALSE"))
            return OK if truth else NEGATIVE
        result = semantics.solve_bruteforce(instance, args.mode, budget)
    except BudgetExceeded as exc:
        raise _Exit(HARD, f"node budget exhausted after {exc.nodes} nodes; progress so far: {_progress(exc.progress)}") from None
    except XCSPError as exc:
        raise _Exit(HARD, f"{exc.code}: {exc}") from None
    if args.mode == "count":
        ctx.say(json.dumps({"count": result}) if ctx.machine else str(result))
        return OK if result else NEGATIVE
    if args.mode == "min-cost":
        cost, best = result
        if ctx.machine:
            ctx.say(json.dumps({"cost": None if cost is None else format_cost(cost), "assignment": best}))
        elif best is None:
            ctx.say("NONE")
        else:
            ctx.say(format_cost(cost))
            ctx.say(_format_assignment(best))
        return OK if best is not None else NEGATIVE
    if ctx.machine:
        ctx.say(json.dumps({"solutions": result}))
    elif not result:
        ctx.say("NONE")
    for solution in result if not ctx.machine else ():
        ctx.say(_format_assignment(solution))
    return OK if result else NEGATIVE


def _progress(progress) -> str:
    if isinstance(progress, list):
        return f"{len(progress)} solution(s) found"
    if isinstance(progress, tuple):
        return "no consistent assignment yet" if progress[0] is None else f"best cost {format_cost(progress[0])}"
    if isinstance(progress, int):
        return f"{progress} solution(s) counted"
    return "none"


def stats(instance) -> tuple[dict, list[str]]:
    """Summary record of ``instance`` and the warnings it raises."""
    constraints = list(instance.all_constraints())
    max_arity = max((c.arity for c in constraints), default=0)
    globals_used: Counter = Counter()
    spelling: dict = {}
    for c in constraints:
        if c.is_global:
            key = c.global_name
            spelling.setdefault(key, c.reference[len("global:"):])
            globals_used[spelling[key]] += 1
    record = {
        "type": instance.type.value,
        "domains": len(instance.domains),
        "variables": len(instance.variables),
        "relations": len(instance.relations),
        "predicates": len(instance.predicates),
        "functions": len(instance.functions),
        "constraints": len(instance.constraints),
        "maxArity": max_arity,
        "searchSpace": instance.search_space(),
        "globals": dict(sorted(globals_used.items())),
    }
    if instance.quantification is not None:
        record["blocks"] = len(instance.quantification)
    warnings = []
    declared = instance.presentation.max_constraint_arity
    if declared is not None and declared != max_arity:
        warnings.append(f"maxConstraintArity={declared} but the largest constraint arity is {max_arity}")
    record["warnings"] = warnings
    return record, warnings


def cmd_stats(ctx: _Context) -> int:
    instance, _ = ctx.load(ctx.args.path)
    record, warnings = stats(instance)
    for w in warnings:
        ctx.note(f"warning: {w}")
    if ctx.machine:
        ctx.say(json.dumps(record, sort_keys=True))
    else:
        for key, value in record.items():
            if key == "globals":
                value = " ".join(f"{k}:{n}" for k, n in value.items())
            elif key == "warnings":
                continue
            ctx.say(f"{key}={value}")
    return OK


# -- entry point --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiet", "-q", action="store_true", help="suppress warnings on stderr")
    common.add_argument("--format", choices=("text", "machine"), default="text",
                        help="output format (machine: JSON)")

    parser = argparse.ArgumentParser(prog="xcsp21", description="Work with XCSP 2.1 constraint instances.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check an instance for structural problems")
    p.add_argument("path")
    p.add_argument("--strict-competition", action="store_true",
                   help="also apply the restrictions on competition instances")
    p.add_argument("--escalate-naming", action="store_true",
                   help="report naming and presentation findings as errors")
    p.set_defaults(run=cmd_validate)

    p = sub.add_parser("convert", parents=[common], help="rewrite an instance in one notation")
    p.add_argument("path")
    p.add_argument("--to", choices=[n.value for n in Notation], required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(run=cmd_convert)

    p = sub.add_parser("check", parents=[common], help="check a full assignment")
    p.add_argument("path")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--assignment", help='bindings such as "V0=2,V1=4"')
    group.add_argument("--assignment-file", help="file with one Name=value binding per line")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("solve", parents=[common], help="exhaustive search")
    p.add_argument("path")
    p.add_argument("--mode", choices=("first", "all", "count", "min-cost", "qcsp"), default="first")
    p.add_argument("--limit", type=int, help=f"node budget (default {semantics.DEFAULT_BUDGET}, or ${BUDGET_ENV})")
    p.set_defaults(run=cmd_solve)

    p = sub.add_parser("stats", parents=[common], help="summarise an instance")
    p.add_argument("path")
    p.set_defaults(run=cmd_stats)
    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    ctx = _Context(args, stdout, stderr)
    try:
        return args.run(ctx)
    except _Exit as exc:
        if exc.message:
            stderr.write(f"xcsp21: {exc.message}\n")
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
