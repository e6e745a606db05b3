"""Structural and competition-level checks over a loaded instance.

Both validators return a :class:`ValidationReport` and never raise on a
bad instance; every finding becomes a diagnostic.  Paths name entities
rather than XML positions, e.g. ``/instance/relations/relation[@name='R0']``.

Constraint order in competition mode compares normalized scopes as
sequences of variable-name strings, so ``V10`` sorts before ``V2``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import catalog
from .diagnostics import ERROR, WARNING, Diagnostic
from .errors import ExprError
from .expr import BOOL, INT, param_refs, typecheck
from .model import (
    INFINITY,
    ConstraintDef,
    CostFunctionDef,
    DomainDef,
    Instance,
    InstanceType,
    ParamDict,
    ParamList,
    PredicateDef,
    Relation,
    VarRef,
)


@dataclass(frozen=True)
class ValidationReport:
    diagnostics: tuple
    strict_mode: bool = False

    @property
    def passed(self) -> bool:
        return not any(d.severity == ERROR for d in self.diagnostics)

    @property
    def errors(self) -> list:
        return [d for d in self.diagnostics if d.severity == ERROR]

    @property
    def warnings(self) -> list:
        return [d for d in self.diagnostics if d.severity == WARNING]

    def codes(self, severity: str | None = ERROR) -> set:
        return {d.code for d in self.diagnostics if severity is None or d.severity == severity}

    def summary(self) -> str:
        verdict = "PASSED" if self.passed else "FAILED"
        mode = "competition" if self.strict_mode else "structure"
        return f"{verdict} ({mode}): {len(self.errors)} error(s), {len(self.warnings)} warning(s)"

    def to_text(self) -> str:
        lines = [d.to_text() for d in self.diagnostics]
        lines.append(self.summary())
        return "\n".join(lines) + "\n"

    def to_json_lines(self) -> str:
        return "".join(json.dumps(d.to_record(), sort_keys=True) + "\n" for d in self.diagnostics)


def _path(kind: str, name: str) -> str:
    section = {"domain": "domains", "variable": "variables", "relation": "relations",
               "predicate": "predicates", "function": "functions", "constraint": "constraints",
               "block": "quantification"}[kind]
    return f"/instance/{section}/{kind}[@name='{name}']"


def _constraint_path(c: ConstraintDef, block: int | None) -> str:
    if block is None:
        return _path("constraint", c.name)
    return f"/instance/quantification/block[{block}]/constraint[@name='{c.name}']"


class _Findings:
    def __init__(self):
        self.items: list[Diagnostic] = []

    def error(self, code, path, message):
        self.items.append(Diagnostic(ERROR, code, path, None, message))

    def warn(self, code, path, message):
        self.items.append(Diagnostic(WARNING, code, path, None, message))


def _var_refs(value) -> list[str]:
    if isinstance(value, VarRef):
        return [value.name]
    if isinstance(value, ParamList):
        return [n for v in value.items for n in _var_refs(v)]
    if isinstance(value, ParamDict):
        return [n for v in value.values() for n in _var_refs(v)]
    return []


# -- structure -------------------------------------------------------------------

def validate_structure(instance: Instance) -> ValidationReport:
    f = _Findings()
    _names(instance, f)
    variables = {v.name for v in instance.variables}
    for v in instance.variables:
        target = instance.get(v.domain)
        if not isinstance(target, DomainDef):
            f.error("UnknownReference", _path("variable", v.name),
                    f"domain {v.domain!r} of variable {v.name} is not a domain")
    for p in instance.predicates:
        _routine(p, BOOL, "predicate", f)
    for fn in instance.functions:
        _routine(fn, INT, "function", f)

    weighted = instance.type == InstanceType.WCSP
    for c in instance.constraints:
        _constraint(instance, c, None, variables, f)
    for b, block in enumerate(instance.quantification or (), 1):
        for c in block.restrictions:
            _constraint(instance, c, b, variables, f)

    if weighted:
        _weighted(instance, f)
    else:
        for r in instance.relations:
            if r.soft:
                f.error("SoftInHardInstance", _path("relation", r.name),
                        f"soft relation {r.name} in a {instance.type.value} instance")
        for fn in instance.functions:
            f.error("SoftInHardInstance", _path("function", fn.name),
                    f"cost function {fn.name} in a {instance.type.value} instance")
        if instance.maximal_cost is not None or instance.initial_cost is not None:
            f.warn("UnexpectedAttribute", "/instance/constraints",
                   "maximalCost/initialCost only apply to WCSP instances")
    _quantification(instance, variables, f)
    return ValidationReport(tuple(f.items), False)


def _names(instance: Instance, f: _Findings) -> None:
    seen: dict = {}
    groups = (("domain", instance.domains), ("variable", instance.variables),
              ("relation", instance.relations), ("predicate", instance.predicates),
              ("function", instance.functions), ("constraint", instance.constraints))
    entries = [(kind, e.name) for kind, items in groups for e in items]
    entries += [("constraint", c.name) for b in instance.quantification or () for c in b.restrictions]
    for kind, name in entries:
        if name in seen:
            f.error("DuplicateName", _path(kind, name), f"name {name!r} is also used by a {seen[name]}")
        else:
            seen[name] = kind


def _routine(r, want: str, kind: str, f: _Findings) -> None:
    path = _path(kind, r.name)
    if len(set(r.params)) != len(r.params):
        f.error("DuplicateParameter", path, f"{r.name} declares a formal parameter twice")
    try:
        got = typecheck(r.body, r.params)
    except ExprError as exc:
        f.error(exc.code, path, f"{r.name}: {exc}")
        return
    if got != want:
        f.error("TypeMismatch", path, f"the body of {kind} {r.name} is {got}-typed, expected {want}")


def _constraint(instance: Instance, c: ConstraintDef, block, variables, f: _Findings) -> None:
    path = _constraint_path(c, block)
    if not c.scope:
        f.error("EmptyScope", path, f"constraint {c.name} has an empty scope")
    if len(set(c.scope)) != len(c.scope):
        f.error("DuplicateScopeVariable", path, f"constraint {c.name} repeats a scope variable")
    for v in c.scope:
        if v not in variables:
            f.error("UnknownReference", path, f"scope variable {v!r} of {c.name} is not a variable")
    if c.declared_arity is not None and c.declared_arity != len(c.scope):
        f.error("ArityAttributeMismatch", path,
                f"arity={c.declared_arity} but the scope of {c.name} has {len(c.scope)} variables")
    scope = set(c.scope)
    if c.is_global:
        _global(c, scope, variables, path, f)
        return
    target = instance.get(c.reference)
    if isinstance(target, Relation):
        if c.parameters is not None:
            f.error("UnexpectedParameters", path, f"{c.name} references a relation but has parameters")
        if target.arity != len(c.scope):
            f.error("ArityMismatch", path,
                    f"{c.name} has {len(c.scope)} scope variables but relation {target.name} has arity {target.arity}")
        return
    if isinstance(target, (PredicateDef, CostFunctionDef)):
        params = c.parameters or ()
        if len(params) != len(target.params):
            f.error("EffectiveParamCount", path,
                    f"{c.name} gives {len(params)} effective parameters; {target.name} has {len(target.params)}")
        used = set()
        for p in params:
            if isinstance(p, VarRef):
                used.add(p.name)
                if p.name not in scope:
                    f.error("ParameterOutsideScope", path, f"{p.name} is a parameter of {c.name} but not in its scope")
            elif isinstance(p, bool) or not isinstance(p, int):
                f.error("InvalidParameter", path, f"effective parameter {p!r} of {c.name} is not an integer or variable")
        for v in c.scope:
            if v not in used:
                f.error("ScopeNotCovered", path, f"scope variable {v} of {c.name} is not an effective parameter")
        if isinstance(target, CostFunctionDef) and instance.type != InstanceType.WCSP:
            f.error("SoftInHardInstance", path, f"{c.name} references cost function {target.name}")
        return
    if target is None:
        f.error("UnknownReference", path, f"reference {c.reference!r} of {c.name} does not exist")
    else:
        f.error("WrongReferenceKind", path,
                f"reference {c.reference!r} of {c.name} is a {type(target).__name__}, not a relation, predicate or function")


def _global(c: ConstraintDef, scope, variables, path, f: _Findings) -> None:
    params = c.parameters or ()
    sig = catalog.signature(c.global_name)
    if sig is not None and len(params) != len(sig):
        f.error("MalformedParams", path,
                f"global {c.global_name} takes {len(sig)} parameter(s), {c.name} gives {len(params)}")
    refs = [n for p in params for n in _var_refs(p)]
    for n in refs:
        if n not in variables:
            f.error("UnknownReference", path, f"{n!r} in the parameters of {c.name} is not a variable")
        elif n not in scope:
            f.error("ParameterOutsideScope", path, f"{n} is a parameter of {c.name} but not in its scope")
    for v in c.scope:
        if v not in refs:
            f.error("ScopeNotCovered", path, f"scope variable {v} of {c.name} does not occur in its parameters")


def _weighted(instance: Instance, f: _Findings) -> None:
    k = instance.maximal_cost
    if k is None:
        f.error("MissingMaximalCost", "/instance/constraints", "a WCSP instance needs maximalCost")
        return
    if k != INFINITY and k < 1:
        f.error("InvalidMaximalCost", "/instance/constraints", f"maximalCost must be at least 1, got {k}")
    if k == INFINITY:
        return
    for r in instance.relations:
        if not r.soft:
            continue
        over = [c for c in (r.default_cost, *r.costs) if c != INFINITY and c > k]
        if over:
            f.error("CostAboveMaximum", _path("relation", r.name),
                    f"relation {r.name} uses cost {max(over)} above maximalCost {k}")
    if instance.initial_cost is not None and instance.initial_cost != INFINITY and instance.initial_cost > k:
        f.error("CostAboveMaximum", "/instance/constraints",
                f"initialCost {instance.initial_cost} is above maximalCost {k}")


def _quantification(instance: Instance, variables, f: _Findings) -> None:
    blocks = instance.quantification
    quantified = instance.type.quantified
    if blocks is None:
        if quantified:
            f.error("MissingQuantification", "/instance",
                    f"a {instance.type.value} instance needs a <quantification> element")
        return
    if not quantified:
        f.error("UnexpectedQuantification", "/instance/quantification",
                f"quantification in a {instance.type.value} instance")
    where: dict = {}
    for b, block in enumerate(blocks, 1):
        path = f"/instance/quantification/block[{b}]"
        if not block.scope:
            f.error("EmptyScope", path, "a block quantifies at least one variable")
        for v in block.scope:
            if v not in variables:
                f.error("UnknownReference", path, f"block variable {v!r} is not a variable")
            elif v in where:
                f.error("DuplicateQuantification", path, f"{v} is already quantified in block {where[v]}")
            else:
                where[v] = b
        if block.restrictions and instance.type != InstanceType.QCSP_PLUS:
            f.error("RestrictionsNotAllowed", path, "block restrictions are only allowed in QCSP+ instances")
        for c in block.restrictions:
            for v in c.scope:
                if where.get(v, b + 1) > b:
                    f.error("RestrictionOrder", _constraint_path(c, b),
                            f"restriction {c.name} mentions {v}, which is not quantified in this or an earlier block")
    for v in instance.variables:
        if v.name not in where:
            f.error("FreeVariable", "/instance/quantification", f"variable {v.name} is not quantified")


# -- competition -------------------------------------------------------------------

def normalized_scope(scope) -> tuple:
    """The scope sorted by variable name (string order)."""
    return tuple(sorted(scope))


def validate_competition(instance: Instance, escalate_naming: bool = False) -> ValidationReport:
    """Structural checks plus the restrictions imposed on competition instances.

    Naming-convention findings (``D0``, ``V0``, ``R0``, ``P0``, ``C0``,
    ``X0`` by position) and presentation-content findings are warnings
    unless ``escalate_naming`` is set.
    """
    base = validate_structure(instance)
    f = _Findings()
    f.items.extend(base.diagnostics)
    naming = f.error if escalate_naming else f.warn

    _naming(instance, naming)
    _presentation(instance, naming)
    for d in instance.domains:
        _domain_order(d, f)
    for r in instance.relations:
        _relation_order(r, f)
    _usage(instance, f)
    _constraint_order(instance, f)
    for c in instance.all_constraints():
        _competition_constraint(instance, c, f)
    for p in instance.predicates:
        unused = [x for x in p.params if x not in param_refs(p.body)]
        for x in unused:
            f.error("UnusedFormalParameter", _path("predicate", p.name),
                    f"formal parameter {x} of {p.name} does not occur in its expression")
    if instance.type == InstanceType.WCSP:
        if instance.maximal_cost == INFINITY:
            f.error("InfiniteMaximalCost", "/instance/constraints", "maximalCost must be finite")
        if instance.initial_cost is not None:
            f.error("InitialCostPresent", "/instance/constraints", "initialCost must be left unspecified")
    for fn in instance.functions:
        f.error("FunctionsNotAllowed", _path("function", fn.name), f"cost function {fn.name} is not allowed")
    return ValidationReport(tuple(f.items), True)


def _naming(instance: Instance, report) -> None:
    groups = (("domain", "D", instance.domains), ("variable", "V", instance.variables),
              ("relation", "R", instance.relations), ("predicate", "P", instance.predicates),
              ("constraint", "C", instance.constraints))
    for kind, letter, items in groups:
        for i, e in enumerate(items):
            if e.name != f"{letter}{i}":
                report("NamingConvention", _path(kind, e.name),
                       f"{kind} number {i + 1} should be named {letter}{i}, not {e.name}")
    for p in instance.predicates:
        for i, x in enumerate(p.params):
            if x != f"X{i}":
                report("NamingConvention", _path("predicate", p.name),
                       f"formal parameter {i + 1} of {p.name} should be named X{i}, not {x}")


def _presentation(instance: Instance, report) -> None:
    p = instance.presentation
    extra = [name for name, value in (("name", p.name), ("minViolatedConstraints", p.min_violated_constraints),
                                      ("nbSolutions", p.nb_solutions), ("solution", p.solution),
                                      ("maxSatisfiableConstraints", p.max_satisfiable_constraints))
             if value is not None]
    if extra:
        report("PresentationRestriction", "/instance/presentation",
               f"only maxConstraintArity, format and type are expected; found {', '.join(extra)}")
    if p.description:
        report("PresentationRestriction", "/instance/presentation", "the presentation content should be empty")


def _domain_order(d: DomainDef, f: _Findings) -> None:
    prev = None
    for piece in d.pieces:
        lo, hi = piece if isinstance(piece, tuple) else (piece, piece)
        if prev is not None:
            plo, phi = prev
            if lo <= phi and hi >= plo:
                f.error("DuplicateDomainValue", _path("domain", d.name),
                        f"domain {d.name} lists value {max(lo, plo)} more than once")
                return
            if lo < plo:
                f.error("DomainNotSorted", _path("domain", d.name),
                        f"domain {d.name} is not in ascending order ({_piece(piece)} after {_piece(prev)})")
                return
        prev = (lo, hi)


def _piece(p) -> str:
    if isinstance(p, tuple):
        return str(p[0]) if p[0] == p[1] else f"{p[0]}..{p[1]}"
    return str(p)


def _relation_order(r: Relation, f: _Findings) -> None:
    path = _path("relation", r.name)
    if not r.tuples:
        f.error("EmptyRelation", path, f"relation {r.name} has no tuples")
        return
    for i in range(1, len(r.tuples)):
        a, b = r.tuples[i - 1], r.tuples[i]
        if a == b:
            f.error("DuplicateTuple", path, f"relation {r.name} lists tuple {a} twice (positions {i - 1} and {i})")
            return
        if b < a:
            f.error("TuplesNotSorted", path,
                    f"relation {r.name}: tuple {i} {b} comes after {a}, breaking lexicographic order")
            return


def _usage(instance: Instance, f: _Findings) -> None:
    referenced = {c.reference for c in instance.all_constraints()}
    used_domains = {v.domain for v in instance.variables}
    for d in instance.domains:
        if d.name not in used_domains:
            f.error("UnusedDomain", _path("domain", d.name), f"domain {d.name} is not used by any variable")
    for r in instance.relations:
        if r.name not in referenced:
            f.error("UnusedRelation", _path("relation", r.name), f"relation {r.name} is not referenced")
    for p in instance.predicates:
        if p.name not in referenced:
            f.error("UnusedPredicate", _path("predicate", p.name), f"predicate {p.name} is not referenced")
    constrained = {v for c in instance.all_constraints() for v in c.scope}
    for v in instance.variables:
        if v.name not in constrained:
            f.error("UnconstrainedVariable", _path("variable", v.name),
                    f"variable {v.name} occurs in no constraint")


def _constraint_order(instance: Instance, f: _Findings) -> None:
    cs = instance.constraints
    for i in range(1, len(cs)):
        a, b = normalized_scope(cs[i - 1].scope), normalized_scope(cs[i].scope)
        if b < a:
            f.error("ConstraintsNotSorted", _path("constraint", cs[i].name),
                    f"{cs[i].name} (normalized scope {' '.join(b)}) comes after "
                    f"{cs[i - 1].name} ({' '.join(a)})")
            return


def _competition_constraint(instance: Instance, c: ConstraintDef, f: _Findings) -> None:
    path = _path("constraint", c.name)
    if c.is_global:
        gname = catalog.canonical_name(c.global_name)
        if gname not in catalog.COMPETITION_GLOBALS:
            f.error("GlobalNotAllowed", path, f"global constraint {c.global_name} is not allowed")
            return
        params = c.parameters or ()
        if gname == "alldifferent" and params and isinstance(params[0], ParamList):
            if any(not isinstance(v, VarRef) for v in params[0].items):
                f.error("AllDifferentConstant", path, f"{c.name}: allDifferent accepts variables only")
        if gname == "weightedsum" and params and isinstance(params[0], ParamList):
            seen = set()
            for term in params[0].items:
                if not isinstance(term, ParamDict):
                    continue
                coef, var = term.get("coef"), term.get("var")
                if coef == 0:
                    f.error("ZeroCoefficient", path, f"{c.name}: weightedSum coefficients must be nonzero")
                if isinstance(var, VarRef):
                    if var.name in seen:
                        f.error("DuplicateWeightedVariable", path, f"{c.name}: {var.name} appears twice")
                    seen.add(var.name)
        return
    target = instance.get(c.reference)
    if not isinstance(target, Relation):
        return
    for t in target.tuples:
        if len(t) != len(c.scope):
            return
        for value, var in zip(t, c.scope):
            dom = instance.get(instance.get(var).domain) if instance.get(var) else None
            if isinstance(dom, DomainDef) and value not in dom:
                f.error("TupleOutOfDomain", path,
                        f"{c.name}: tuple {t} of {target.name} puts {value} outside the domain of {var}")
                return

