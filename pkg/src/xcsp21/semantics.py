"""Reference semantics: constraint checking, WCSP costs, brute-force search.

Nothing here tries to be fast.  The search is a plain depth-first
enumeration (variables in declaration order, values ascending) that
checks each constraint as soon as its whole scope is assigned, which is
enough for desk-sized instances and keeps the results easy to trust.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

from . import catalog
from .errors import (
    BudgetExceeded,
    DomainViolation,
    InconsistentTask,
    MalformedParams,
    NegativeFunctionCost,
    NotApplicable,
    OpenInstance,
    PartialAssignment,
    UnboundVariable,
    UnknownName,
    UnsupportedGlobal,
)
from .expr import evaluate
from .model import (
    INFINITY,
    NIL,
    Atom,
    ConstraintDef,
    Cost,
    CostFunctionDef,
    Instance,
    InstanceType,
    ParamDict,
    ParamList,
    PredicateDef,
    Relation,
    Semantics,
    VarRef,
    oplus,
)

DEFAULT_BUDGET = 10 ** 7

Assignment = Mapping[str, int]


def _scope_values(c: ConstraintDef, assignment: Assignment) -> tuple:
    try:
        return tuple(assignment[v] for v in c.scope)
    except KeyError as exc:
        raise UnboundVariable(f"constraint {c.name}: variable {exc.args[0]} is not assigned") from None


def _dvar(v, assignment: Assignment) -> int:
    """Value of an integer-or-variable parameter."""
    if isinstance(v, bool):
        raise MalformedParams(f"expected an integer or a variable, got {v!r}")
    if isinstance(v, int):
        return v
    if isinstance(v, VarRef):
        try:
            return assignment[v.name]
        except KeyError:
            raise UnboundVariable(f"variable {v.name} is not assigned") from None
    raise MalformedParams(f"expected an integer or a variable, got {v!r}")


def _bindings(routine, c: ConstraintDef, assignment: Assignment) -> dict:
    params = c.parameters
    if params is None or len(params) != len(routine.params):
        got = 0 if params is None else len(params)
        raise MalformedParams(
            f"constraint {c.name}: {got} effective parameters for {len(routine.params)} formals of {routine.name}")
    _scope_values(c, assignment)
    return {formal: _dvar(p, assignment) for formal, p in zip(routine.params, params)}


def _target(instance: Instance, c: ConstraintDef):
    try:
        return instance.resolve(c.reference)
    except UnknownName:
        raise UnknownName(f"constraint {c.name}: unknown reference {c.reference!r}") from None


# -- constraint checking ----------------------------------------------------------

def check_constraint(instance: Instance, constraint: ConstraintDef, assignment: Assignment) -> bool:
    """Whether ``assignment`` satisfies a hard constraint."""
    if constraint.is_global:
        _scope_values(constraint, assignment)
        return eval_global(constraint.global_name, constraint.parameters or (), assignment)
    target = _target(instance, constraint)
    if isinstance(target, Relation):
        values = _scope_values(constraint, assignment)
        if target.semantics == Semantics.SUPPORTS:
            return values in target.table
        if target.semantics == Semantics.CONFLICTS:
            return values not in target.table
        raise NotApplicable(f"constraint {constraint.name} references the soft relation {target.name}")
    if isinstance(target, PredicateDef):
        return bool(evaluate(target.body, _bindings(target, constraint, assignment)))
    if isinstance(target, CostFunctionDef):
        raise NotApplicable(f"constraint {constraint.name} references the cost function {target.name}")
    raise MalformedParams(f"constraint {constraint.name}: {constraint.reference!r} is not a relation or predicate")


_COMPARE = {
    "eq": lambda a, b: a == b,
    "ne": lambda a, b: a != b,
    "ge": lambda a, b: a >= b,
    "gt": lambda a, b: a > b,
    "le": lambda a, b: a <= b,
    "lt": lambda a, b: a < b,
}


def _list(value, what) -> tuple:
    if not isinstance(value, ParamList):
        raise MalformedParams(f"{what} must be a list, got {value!r}")
    return value.items


def _arity(name, params, n):
    if len(params) != n:
        raise MalformedParams(f"{name} takes {n} parameter(s), got {len(params)}")


def eval_global(name: str, params, assignment: Assignment) -> bool:
    """Evaluate one of the four competition globals.

    ``name`` is compared case-insensitively.  ``element`` indexes its
    table from 1, and ``cumulative`` treats every task as the half-open
    interval ``[origin, end)``.
    """
    gname = catalog.canonical_name(name)
    if gname not in catalog.COMPETITION_GLOBALS:
        raise UnsupportedGlobal(f"no semantics for global constraint {name!r}")
    params = catalog.bind_conventional_order(gname, params)
    if gname == "alldifferent":
        _arity(name, params, 1)
        values = [_dvar(v, assignment) for v in _list(params[0], "allDifferent parameter")]
        return len(set(values)) == len(values)
    if gname == "weightedsum":
        _arity(name, params, 3)
        terms, op, rhs = params
        if not isinstance(op, Atom):
            raise MalformedParams(f"weightedSum operator must be a relational atom, got {op!r}")
        total = 0
        for term in _list(terms, "weightedSum terms"):
            if not isinstance(term, ParamDict) or "coef" not in term or "var" not in term:
                raise MalformedParams(f"weightedSum term must be a dictionary with coef and var, got {term!r}")
            coef = term["coef"]
            if isinstance(coef, bool) or not isinstance(coef, int):
                raise MalformedParams(f"weightedSum coefficient must be an integer, got {coef!r}")
            total += coef * _dvar(term["var"], assignment)
        return _COMPARE[op.op](total, _dvar(rhs, assignment))
    if gname == "element":
        _arity(name, params, 3)
        index = _dvar(params[0], assignment)
        table = _list(params[1], "element table")
        if not 1 <= index <= len(table):
            return False
        return _dvar(table[index - 1], assignment) == _dvar(params[2], assignment)
    # cumulative
    _arity(name, params, 2)
    tasks = [_task(t, assignment) for t in _list(params[0], "cumulative tasks")]
    limit = _dvar(params[1], assignment)
    if any(d < 0 or h < 0 for _, d, _, h in tasks):
        return False
    for start, duration, _, _ in tasks:
        if duration == 0:
            continue
        load = sum(h for o, d, e, h in tasks if o <= start < e)
        if load > limit:
            return False
    return True


def _task(task, assignment: Assignment) -> tuple:
    if not isinstance(task, ParamDict):
        raise MalformedParams(f"cumulative task must be a dictionary, got {task!r}")
    got = {}
    for key in ("origin", "duration", "end", "height"):
        v = task.get(key, NIL)
        if v != NIL:
            got[key] = _dvar(v, assignment)
    if "height" not in got:
        raise MalformedParams("cumulative task needs a height")
    missing = [k for k in ("origin", "duration", "end") if k not in got]
    if len(missing) > 1:
        raise MalformedParams(f"cumulative task misses {' and '.join(missing)}; at most one may be absent")
    if not missing:
        o, d, e = got["origin"], got["duration"], got["end"]
        if o + d != e:
            raise InconsistentTask(f"task with origin {o}, duration {d} and end {e}: origin + duration != end")
    elif missing[0] == "origin":
        got["origin"] = got["end"] - got["duration"]
    elif missing[0] == "duration":
        got["duration"] = got["end"] - got["origin"]
    else:
        got["end"] = got["origin"] + got["duration"]
    return got["origin"], got["duration"], got["end"], got["height"]


# -- costs -----------------------------------------------------------------------

def cost_constraint(instance: Instance, constraint: ConstraintDef, assignment: Assignment) -> Cost:
    """Cost of one constraint under the instance's maximal cost ``k``.

    Hard constraints cost 0 or ``k``.  Soft tuples and cost-function
    values above ``k`` are clamped to ``k``.
    """
    k = instance.k
    if not constraint.is_global:
        target = _target(instance, constraint)
        if isinstance(target, Relation) and target.soft:
            values = _scope_values(constraint, assignment)
            return min(target.table.get(values, target.default_cost), k)
        if isinstance(target, CostFunctionDef):
            value = evaluate(target.body, _bindings(target, constraint, assignment))
            if value < 0:
                raise NegativeFunctionCost(f"function {target.name} returned {value} for constraint {constraint.name}")
            return min(value, k)
    return 0 if check_constraint(instance, constraint, assignment) else k


@dataclass(frozen=True)
class SolutionReport:
    """Outcome of checking a full assignment.

    For WCSP instances ``satisfied`` equals ``consistent`` and
    ``violated`` lists the constraints whose cost reaches ``k``.
    """

    kind: InstanceType
    satisfied: bool
    violated: tuple = ()
    total_cost: Cost | None = None
    consistent: bool | None = None
    costs: dict = field(default_factory=dict)


def _check_total(instance: Instance, assignment: Assignment) -> None:
    names = {v.name for v in instance.variables}
    for name in assignment:
        if name not in names:
            raise UnknownName(f"{name!r} is not a variable of the instance")
    for v in instance.variables:
        if v.name not in assignment:
            raise PartialAssignment(f"variable {v.name} is not assigned")
        value = assignment[v.name]
        if isinstance(value, bool) or not isinstance(value, int) or value not in instance.domain_of(v.name):
            raise DomainViolation(f"value {value!r} is not in the domain of {v.name}")


def check_solution(instance: Instance, assignment: Assignment) -> SolutionReport:
    if instance.type.quantified:
        raise NotApplicable("solutions of quantified instances are strategies, not assignments")
    _check_total(instance, assignment)
    if instance.type == InstanceType.WCSP:
        k = instance.k
        total = instance.base_cost
        costs = {}
        for c in instance.constraints:
            cost = cost_constraint(instance, c, assignment)
            costs[c.name] = cost
            total = oplus(total, cost, k)
        violated = tuple(name for name, cost in costs.items() if cost >= k)
        consistent = total < k
        return SolutionReport(InstanceType.WCSP, consistent, violated, total, consistent, costs)
    violated = tuple(c.name for c in instance.constraints if not check_constraint(instance, c, assignment))
    return SolutionReport(InstanceType.CSP, not violated, violated)


# -- brute force -------------------------------------------------------------------

MODES = ("first", "all", "count", "min-cost")


def _normal_mode(mode: str) -> str:
    m = {"mincost": "min-cost", "min_cost": "min-cost"}.get(mode.lower(), mode.lower())
    if m not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    return m


def _schedule(instance: Instance, order) -> list[list[ConstraintDef]]:
    """Constraints grouped by the depth at which their scope is complete."""
    position = {name: i for i, name in enumerate(order)}
    at: list[list] = [[] for _ in order]
    empty_scope = []
    for c in instance.constraints:
        if c.scope:
            at[max(position[v] for v in c.scope)].append(c)
        else:
            empty_scope.append(c)
    if empty_scope and at:
        at[0] = empty_scope + at[0]
    return at


def solve_bruteforce(instance: Instance, mode: str = "all", limit: int = DEFAULT_BUDGET):
    """Exhaustive search.

    Returns a list of assignments for ``first`` (at most one) and ``all``,
    an int for ``count``, and ``(best_cost, assignment)`` for
    ``min-cost`` (``(None, None)`` when no consistent assignment exists).
    Each value tried counts as one node; going past ``limit`` nodes
    raises :class:`BudgetExceeded` carrying what was found so far.
    """
    mode = _normal_mode(mode)
    if instance.type.quantified:
        raise NotApplicable("use eval_qcsp for quantified instances")
    weighted = instance.type == InstanceType.WCSP or mode == "min-cost"
    order = [v.name for v in instance.variables]
    domains = [instance.domain_of(name).values for name in order]
    schedule = _schedule(instance, order)
    k = instance.k if instance.type == InstanceType.WCSP else INFINITY
    base = instance.base_cost if instance.type == InstanceType.WCSP else 0

    solutions: list[dict] = []
    count = 0
    best: list = [None, None]
    nodes = 0
    assignment: dict = {}

    def progress():
        if mode == "count":
            return count
        if mode == "min-cost":
            return tuple(best)
        return list(solutions)

    def bound():
        if mode == "min-cost" and best[0] is not None:
            return best[0]
        return k

    def search(depth: int, cost) -> bool:
        # returns True to stop the whole search
        nonlocal count, nodes
        if depth == len(order):
            if mode == "count":
                count += 1
            elif mode == "min-cost":
                best[0], best[1] = cost, dict(assignment)
            else:
                solutions.append(dict(assignment))
                return mode == "first"
            return False
        name = order[depth]
        for value in domains[depth]:
            nodes += 1
            if nodes > limit:
                raise BudgetExceeded(nodes - 1, progress())
            assignment[name] = value
            if weighted:
                total = cost
                for c in schedule[depth]:
                    total = oplus(total, cost_constraint_k(instance, c, assignment, k), k)
                    if total >= bound():
                        break
                ok = total < bound()
            else:
                total = cost
                ok = all(check_constraint(instance, c, assignment) for c in schedule[depth])
            if ok and search(depth + 1, total):
                return True
        assignment.pop(name, None)
        return False

    if not order:
        ok = base < k if weighted else all(check_constraint(instance, c, {}) for c in instance.constraints)
        if ok:
            search(0, base)
    else:
        search(0, base)
    result = progress()
    if mode == "first":
        return result[:1]
    return result


def cost_constraint_k(instance: Instance, constraint: ConstraintDef, assignment: Assignment, k) -> Cost:
    """:func:`cost_constraint` with an explicit ``k`` (used for CSP min-cost)."""
    if instance.type == InstanceType.WCSP:
        return cost_constraint(instance, constraint, assignment)
    return 0 if check_constraint(instance, constraint, assignment) else k


# -- quantified instances ------------------------------------------------------------

def eval_qcsp(instance: Instance, budget: int = DEFAULT_BUDGET) -> bool:
    """Truth value of a closed QCSP or QCSP+ instance.

    Blocks are read left to right.  A ``forall`` block holds when every
    combination of its values that satisfies the block restrictions makes
    the rest hold (vacuously true when none does); an ``exists`` block
    needs one such combination.  After the last block every goal
    constraint must hold.
    """
    if not instance.type.quantified:
        raise NotApplicable(f"{instance.type.value} instances carry no quantification")
    blocks = instance.quantification or ()
    seen: dict = {}
    for i, block in enumerate(blocks):
        for v in block.scope:
            if v in seen:
                raise MalformedParams(f"variable {v} is quantified in blocks {seen[v] + 1} and {i + 1}")
            seen[v] = i
    free = [v.name for v in instance.variables if v.name not in seen]
    if free:
        raise OpenInstance(f"variables without a quantifier: {', '.join(free)}")

    nodes = 0
    assignment: dict = {}
    domains = {v.name: instance.domain_of(v.name).values for v in instance.variables}

    def holds(b: int) -> bool:
        nonlocal nodes
        if b == len(blocks):
            return all(check_constraint(instance, c, assignment) for c in instance.constraints)
        block = blocks[b]
        universal = block.quantifier == "forall"
        for combo in itertools.product(*(domains[v] for v in block.scope)):
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(nodes - 1)
            assignment.update(zip(block.scope, combo))
            if not all(check_constraint(instance, c, assignment) for c in block.restrictions):
                continue
            if holds(b + 1) != universal:
                _forget(assignment, block.scope)
                return not universal
        _forget(assignment, block.scope)
        return universal

    return holds(0)


def _forget(assignment: dict, names) -> None:
    for n in names:
        assignment.pop(n, None)
