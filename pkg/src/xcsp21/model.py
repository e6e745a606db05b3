"""Immutable in-memory representation of a constraint network instance.

Everything here is a frozen dataclass; building a modified instance goes
through :func:`dataclasses.replace`.  Costs are plain Python ints, with
:data:`INFINITY` (``math.inf``) standing for the unbounded cost, so the
usual ``<``/``min``/``+`` already behave the way the valuation structure
needs.
"""

from __future__ import annotations

import bisect
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import TYPE_CHECKING, Iterator, Union

from .errors import EmptyDomain, InvertedInterval, NegativeCost, UnknownName

if TYPE_CHECKING:
    from .expr import Expr

INFINITY = math.inf

Cost = Union[int, float]  # finite costs are ints; the only float is INFINITY

_IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

FORMAT = "XCSP 2.1"


def is_identifier(text: str) -> bool:
    return bool(_IDENTIFIER.match(text))


def is_cost(value) -> bool:
    if value is INFINITY or value == INFINITY:
        return True
    return isinstance(value, int) and not isinstance(value, bool) and value >= 0


def parse_cost(text: str) -> Cost:
    """Read a cost attribute: a nonnegative integer or ``infinity``."""
    text = text.strip()
    if text == "infinity":
        return INFINITY
    try:
        value = int(text)
    except ValueError:
        raise ValueError(f"not a cost: {text!r}") from None
    if value < 0:
        raise NegativeCost(f"negative cost {value}")
    return value


def format_cost(cost: Cost) -> str:
    return "infinity" if cost == INFINITY else str(int(cost))


def oplus(a: Cost, b: Cost, k: Cost) -> Cost:
    """Bounded addition of the valuation structure: ``min(k, a + b)``."""
    return min(k, a + b)


class InstanceType(str, Enum):
    CSP = "CSP"
    QCSP = "QCSP"
    QCSP_PLUS = "QCSP+"
    WCSP = "WCSP"

    @property
    def quantified(self) -> bool:
        return self in (InstanceType.QCSP, InstanceType.QCSP_PLUS)


class Semantics(str, Enum):
    SUPPORTS = "supports"
    CONFLICTS = "conflicts"
    SOFT = "soft"


# -- structured global-constraint parameters --------------------------------

RELATIONAL_ATOMS = ("eq", "ne", "ge", "gt", "le", "lt")


@dataclass(frozen=True)
class VarRef:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Atom:
    op: str

    def __post_init__(self):
        if self.op not in RELATIONAL_ATOMS:
            raise ValueError(f"unknown atom <{self.op}/>")


@dataclass(frozen=True)
class Nil:
    pass


@dataclass(frozen=True)
class Infinity:
    """The ``<infinity/>`` parameter value (distinct from the cost INFINITY)."""


NIL = Nil()


@dataclass(frozen=True)
class ParamList:
    items: tuple = ()

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]


@dataclass(frozen=True, eq=False)
class ParamDict:
    """A dictionary parameter.

    ``entries`` keeps the written order.  A dictionary written in
    conventional order starts out with ``None`` keys; once its keys are
    known (from the global constraint signature) it is rebuilt with real
    keys and ``positional=True`` remembers where it came from.

    Equality ignores entry order, the ``positional`` flag, and entries
    bound to ``<nil/>`` (an absent key and a nil key mean the same thing).
    """

    entries: tuple = ()
    positional: bool = False

    @property
    def keyed(self) -> bool:
        return all(k is not None for k, _ in self.entries)

    def keys(self):
        return [k for k, _ in self.entries]

    def values(self):
        return [v for _, v in self.entries]

    def get(self, key, default=None):
        for k, v in self.entries:
            if k == key:
                return v
        return default

    def __getitem__(self, key):
        for k, v in self.entries:
            if k == key:
                return v
        raise KeyError(key)

    def __contains__(self, key):
        return any(k == key for k, _ in self.entries)

    def __len__(self):
        return len(self.entries)

    def _normal(self):
        if self.keyed:
            return ("keyed", frozenset((k, v) for k, v in self.entries if v != NIL))
        return ("positional", tuple(v for _, v in self.entries))

    def __eq__(self, other):
        if not isinstance(other, ParamDict):
            return NotImplemented
        return self._normal() == other._normal()

    def __hash__(self):
        return hash(self._normal())


ParamValue = Union[int, bool, VarRef, Atom, Nil, Infinity, ParamList, ParamDict]


# -- entities ----------------------------------------------------------------

@dataclass(frozen=True)
class Presentation:
    format: str = FORMAT
    name: str | None = None
    max_constraint_arity: int | None = None
    min_violated_constraints: str | None = None
    nb_solutions: str | None = None
    solution: str | None = None
    type: InstanceType = InstanceType.CSP
    type_given: bool = False
    description: str = ""
    max_satisfiable_constraints: str | None = None  # deprecated, kept verbatim


_COUNT_CLAIM = re.compile(r"\s*(?:(at least|at most)\s+)?(\d+)\s*\Z")


def parse_count_claim(text: str):
    """Decode ``nbSolutions``/``minViolatedConstraints`` style values.

    Returns ``("unknown", None)``, ``("exact", n)``, ``("at least", k)`` or
    ``("at most", k)``; raises :class:`ValueError` on anything else.
    """
    if text.strip() == "?":
        return ("unknown", None)
    m = _COUNT_CLAIM.match(text)
    if not m:
        raise ValueError(f"malformed count {text!r}")
    return (m.group(1) or "exact", int(m.group(2)))


Piece = Union[int, "tuple[int, int]"]


@dataclass(frozen=True)
class DomainDef:
    """A named domain.

    ``pieces`` are the integers and ``(lo, hi)`` intervals exactly as
    written; ``values`` is the sorted, deduplicated expansion.
    """

    name: str
    pieces: tuple

    def __post_init__(self):
        if not self.pieces:
            raise EmptyDomain(f"domain {self.name!r} has no values")
        for p in self.pieces:
            if isinstance(p, tuple) and p[0] > p[1]:
                raise InvertedInterval(f"interval {p[0]}..{p[1]} in domain {self.name!r}")

    @cached_property
    def intervals(self) -> tuple:
        """Disjoint, sorted, non-adjacent closed intervals covering the domain."""
        spans = sorted((p, p) if isinstance(p, int) else tuple(p) for p in self.pieces)
        merged: list[list[int]] = []
        for lo, hi in spans:
            if merged and lo <= merged[-1][1] + 1:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return tuple((lo, hi) for lo, hi in merged)

    @cached_property
    def values(self) -> tuple:
        return tuple(v for lo, hi in self.intervals for v in range(lo, hi + 1))

    @property
    def nb_values(self) -> int:
        return sum(hi - lo + 1 for lo, hi in self.intervals)

    @cached_property
    def _lows(self):
        return [lo for lo, _ in self.intervals]

    def __contains__(self, value) -> bool:
        i = bisect.bisect_right(self._lows, value) - 1
        return i >= 0 and value <= self.intervals[i][1]

    def __iter__(self) -> Iterator[int]:
        return iter(self.values)

    def __len__(self) -> int:
        return self.nb_values


@dataclass(frozen=True)
class VariableDef:
    name: str
    domain: str


@dataclass(frozen=True)
class Relation:
    name: str
    arity: int
    semantics: Semantics
    tuples: tuple = ()
    costs: tuple | None = None
    default_cost: Cost | None = None

    def __post_init__(self):
        soft = self.semantics == Semantics.SOFT
        if soft != (self.costs is not None) or soft != (self.default_cost is not None):
            raise ValueError(f"relation {self.name!r}: costs and defaultCost go with soft semantics only")
        if soft and len(self.costs) != len(self.tuples):
            raise ValueError(f"relation {self.name!r}: {len(self.costs)} costs for {len(self.tuples)} tuples")

    @property
    def nb_tuples(self) -> int:
        return len(self.tuples)

    @property
    def soft(self) -> bool:
        return self.semantics == Semantics.SOFT

    @cached_property
    def table(self):
        """Tuple lookup: a frozenset for hard relations, tuple -> cost for soft ones.

        A soft tuple listed twice keeps its first cost.
        """
        if self.soft:
            out = {}
            for t, c in zip(self.tuples, self.costs):
                out.setdefault(t, c)
            return out
        return frozenset(self.tuples)


@dataclass(frozen=True)
class PredicateDef:
    """``params`` are the formal parameter names; their type is always int."""

    name: str
    params: tuple
    body: Expr


@dataclass(frozen=True)
class CostFunctionDef:
    name: str
    params: tuple
    body: Expr
    return_type: str = "int"


GLOBAL_PREFIX = "global:"


@dataclass(frozen=True)
class ConstraintDef:
    """A constraint.

    ``parameters`` is ``None`` for a constraint in extension, the tuple of
    effective parameters (ints and :class:`VarRef`) for one in intension,
    and the tuple of :data:`ParamValue` for a global constraint.
    ``declared_arity`` is the ``arity`` attribute as read, if any.
    """

    name: str
    scope: tuple
    reference: str
    parameters: tuple | None = None
    declared_arity: int | None = None

    @property
    def arity(self) -> int:
        return len(self.scope)

    @property
    def is_global(self) -> bool:
        return self.reference.lower().startswith(GLOBAL_PREFIX)

    @property
    def global_name(self) -> str | None:
        """Lower-cased global name, or None for extension/intension constraints."""
        if not self.is_global:
            return None
        return self.reference[len(GLOBAL_PREFIX):].lower()


@dataclass(frozen=True)
class QuantBlock:
    quantifier: str  # "exists" | "forall"
    scope: tuple
    restrictions: tuple = ()

    def __post_init__(self):
        if self.quantifier not in ("exists", "forall"):
            raise ValueError(f"unknown quantifier {self.quantifier!r}")


@dataclass(frozen=True)
class Instance:
    presentation: Presentation = field(default_factory=Presentation)
    domains: tuple = ()
    variables: tuple = ()
    relations: tuple = ()
    predicates: tuple = ()
    functions: tuple = ()
    constraints: tuple = ()
    maximal_cost: Cost | None = None
    initial_cost: Cost | None = None
    quantification: tuple | None = None
    # (owner key, raw XML text) pairs; owner keys look like "instance",
    # "domains", "relation:R0", "block:1"
    extensions: tuple = ()

    @property
    def type(self) -> InstanceType:
        return self.presentation.type

    @property
    def k(self) -> Cost:
        """The maximal cost, defaulting to INFINITY when unset."""
        return INFINITY if self.maximal_cost is None else self.maximal_cost

    @property
    def base_cost(self) -> Cost:
        return 0 if self.initial_cost is None else self.initial_cost

    @cached_property
    def _index(self) -> dict:
        index: dict = {}
        groups = (self.domains, self.variables, self.relations, self.predicates,
                  self.functions, self.constraints)
        for group in groups:
            for entity in group:
                index.setdefault(entity.name, entity)
        for block in self.quantification or ():
            for c in block.restrictions:
                index.setdefault(c.name, c)
        return index

    def resolve(self, name: str):
        try:
            return self._index[name]
        except KeyError:
            raise UnknownName(f"no entity named {name!r}") from None

    def get(self, name: str, default=None):
        return self._index.get(name, default)

    @cached_property
    def _domain_of(self) -> dict:
        domains = {d.name: d for d in self.domains}
        return {v.name: domains.get(v.domain) for v in self.variables}

    def domain_of(self, variable: str) -> DomainDef:
        try:
            dom = self._domain_of[variable]
        except KeyError:
            raise UnknownName(f"no variable named {variable!r}") from None
        if dom is None:
            raise UnknownName(f"variable {variable!r} has an unresolved domain")
        return dom

    def all_constraints(self) -> Iterator[ConstraintDef]:
        """Goal constraints followed by every block restriction."""
        yield from self.constraints
        for block in self.quantification or ():
            yield from block.restrictions

    def search_space(self) -> int:
        return math.prod(self.domain_of(v.name).nb_values for v in self.variables)


def resolve(instance: Instance, name: str):
    """Return the unique entity called ``name`` or raise :class:`UnknownName`."""
    return instance.resolve(name)


# -- model equality ------------------------------------------------------------

def _canon_params(params):
    if params is None:
        return None
    return tuple(params)


def _canon_constraint(c: ConstraintDef):
    ref = GLOBAL_PREFIX + c.global_name if c.is_global else c.reference
    return (c.name, tuple(c.scope), ref, _canon_params(c.parameters))


def canonical(instance: Instance):
    """A notation-independent, hashable summary of ``instance``.

    Two instances with equal canonical forms are *model-equal*: same
    expanded domains, tuple sequences, costs and expression trees,
    regardless of whitespace, interval syntax or dictionary entry order.
    """
    p = instance.presentation
    return (
        (p.format, p.name, p.max_constraint_arity, p.min_violated_constraints,
         p.nb_solutions, p.solution, p.type, tuple(p.description.split()),
         p.max_satisfiable_constraints),
        tuple((d.name, d.intervals) for d in instance.domains),
        tuple((v.name, v.domain) for v in instance.variables),
        tuple((r.name, r.arity, r.semantics, r.tuples, r.costs, r.default_cost)
              for r in instance.relations),
        tuple((q.name, q.params, q.body) for q in instance.predicates),
        tuple((f.name, f.params, f.body, f.return_type) for f in instance.functions),
        tuple(_canon_constraint(c) for c in instance.constraints),
        instance.maximal_cost,
        instance.initial_cost,
        None if instance.quantification is None else tuple(
            (b.quantifier, tuple(b.scope), tuple(_canon_constraint(c) for c in b.restrictions))
            for b in instance.quantification),
        tuple(sorted(instance.extensions)),
    )


def model_equal(a: Instance, b: Instance) -> bool:
    return canonical(a) == canonical(b)
