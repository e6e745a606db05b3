"""Reading and writing XCSP 2.1 documents.

:func:`load_instance` accepts tagged, abridged or mixed bodies and returns
an :class:`~xcsp21.model.Instance` together with the warnings raised while
reading it.  Any error-severity finding makes it raise
:class:`~xcsp21.errors.LoadError` instead.  :func:`write_instance` emits a
document in one notation only, and :func:`convert` chains the two.
"""

from __future__ import annotations

from enum import Enum
from pathlib import Path
from xml.sax.saxutils import escape

from . import catalog, lexparse, xmltree
from .diagnostics import ERROR, WARNING, Diagnostic
from .errors import EmptyDomain, FragmentError, LoadError, MalformedParams, XCSPError
from .expr import parse_functional, to_functional
from .model import (
    FORMAT,
    GLOBAL_PREFIX,
    INFINITY,
    NIL,
    Atom,
    ConstraintDef,
    CostFunctionDef,
    DomainDef,
    Infinity,
    Instance,
    InstanceType,
    Nil,
    ParamDict,
    ParamList,
    PredicateDef,
    Presentation,
    QuantBlock,
    Relation,
    Semantics,
    VariableDef,
    VarRef,
    format_cost,
    is_identifier,
    parse_cost,
    parse_count_claim,
)


class Notation(str, Enum):
    TAGGED = "tagged"
    ABRIDGED = "abridged"


_KNOWN_ATTRIBUTES = {
    "instance": set(),
    "presentation": {"name", "maxConstraintArity", "minViolatedConstraints", "nbSolutions",
                     "solution", "type", "format", "maxSatisfiableConstraints"},
    "domains": {"nbDomains"},
    "domain": {"name", "nbValues"},
    "variables": {"nbVariables"},
    "variable": {"name", "domain"},
    "relations": {"nbRelations"},
    "relation": {"name", "arity", "nbTuples", "semantics", "defaultCost"},
    "predicates": {"nbPredicates"},
    "predicate": {"name"},
    "functions": {"nbFunctions"},
    "function": {"name", "return"},
    "constraints": {"nbConstraints", "maximalCost", "initialCost"},
    "constraint": {"name", "arity", "scope", "reference"},
    "quantification": {"nbBlocks"},
    "block": {"quantifier", "scope"},
}

_SECTIONS = ("presentation", "domains", "variables", "relations", "predicates",
             "functions", "constraints", "quantification")

_QUANTIFIERS = {"exists": "exists", "forall": "forall",
                "existential": "exists", "universal": "forall"}

_OTHER_REPRESENTATIONS = ("math", "postfix", "infix")


class _Skip(Exception):
    """Abandon the current entity; the reason is already recorded."""


class _Reader:
    def __init__(self, root: xmltree.Element):
        self.root = root
        self.diags: list[Diagnostic] = []
        self.extensions: list[tuple[str, str]] = []
        self.names: dict[str, str] = {}
        self.variable_elements: dict = {}

    # -- diagnostics ---------------------------------------------------------

    def error(self, code, el, message, offset=None):
        self.diags.append(Diagnostic(ERROR, code, el.path, el.offset if offset is None else offset, message))

    def warn(self, code, el, message, offset=None):
        self.diags.append(Diagnostic(WARNING, code, el.path, el.offset if offset is None else offset, message))

    def lift(self, exc: XCSPError, el):
        offset = getattr(exc, "offset", None)
        self.error(exc.code, el, getattr(exc, "message", str(exc)), offset)

    # -- helpers -------------------------------------------------------------

    def check_attributes(self, el):
        known = _KNOWN_ATTRIBUTES.get(el.tag, set())
        for name in el.attrib:
            if name not in known:
                self.warn("UnknownAttribute", el, f"unknown attribute {name!r} on <{el.tag}>")

    def collect_extensions(self, el, owner, skip=()):
        for child in el.elements():
            if child.tag == "extension":
                self.extensions.append((owner, child.raw))
            elif child.tag not in skip:
                self.collect_extensions(child, owner, skip)

    def children(self, el, allowed):
        """Element children of ``el`` with tag in ``allowed``; warn on others."""
        out = []
        for child in el.elements():
            if child.tag in allowed:
                out.append(child)
            elif child.tag != "extension":
                self.warn("UnknownElement", child, f"unexpected element <{child.tag}> inside <{el.tag}>")
        for text in el.children:
            if isinstance(text, str) and text.strip():
                self.warn("UnexpectedText", el, f"text inside <{el.tag}> is ignored",
                          getattr(text, "offset", None))
        return out

    def attr(self, el, name, required=True):
        value = el.attrib.get(name)
        if value is None and required:
            self.error("SchemaError", el, f"<{el.tag}> is missing the mandatory attribute {name!r}")
            raise _Skip
        return value

    def int_attr(self, el, name, required=True, minimum=None):
        raw = self.attr(el, name, required)
        if raw is None:
            return None
        try:
            value = int(raw.strip())
        except ValueError:
            self.error("InvalidAttribute", el, f"{name}={raw!r} is not an integer")
            raise _Skip from None
        if minimum is not None and value < minimum:
            self.error("InvalidAttribute", el, f"{name}={value} must be at least {minimum}")
            raise _Skip
        return value

    def cost_attr(self, el, name, required=True):
        raw = self.attr(el, name, required)
        if raw is None:
            return None
        try:
            return parse_cost(raw)
        except FragmentError as exc:
            self.error(exc.code, el, f"{name}: {exc.message}")
            raise _Skip from None
        except ValueError:
            self.error("InvalidAttribute", el, f"{name}={raw!r} is not a cost")
            raise _Skip from None

    def name_attr(self, el):
        name = self.attr(el, "name")
        if not is_identifier(name):
            self.error("InvalidIdentifier", el, f"{name!r} is not a valid identifier")
            raise _Skip
        if name in self.names:
            self.error("DuplicateName", el, f"name {name!r} is already used by {self.names[name]}")
            raise _Skip
        self.names[name] = el.path
        return name

    def count(self, section, attr, actual):
        try:
            declared = self.int_attr(section, attr, minimum=0)
        except _Skip:
            return
        if declared != actual:
            self.error("CountMismatch", section,
                       f"{attr}={declared} but <{section.tag}> holds {actual}")

    def scope_attr(self, el):
        raw = self.attr(el, "scope")
        names = raw.split()
        for n in names:
            if not is_identifier(n):
                self.error("InvalidIdentifier", el, f"{n!r} in scope is not a valid identifier")
                raise _Skip
        if len(set(names)) != len(names):
            self.error("DuplicateScopeVariable", el, f"scope {raw!r} repeats a variable")
            raise _Skip
        return tuple(names)

    # -- sections ------------------------------------------------------------

    def read(self) -> Instance:
        root = self.root
        if root.tag != "instance":
            self.error("SchemaError", root, f"root element must be <instance>, got <{root.tag}>")
            return None
        self.check_attributes(root)
        self.collect_extensions(root, "instance", _SECTIONS)
        sections = {}
        for child in self.children(root, _SECTIONS):
            if child.tag in sections:
                self.error("SchemaError", child, f"<{child.tag}> appears twice")
                continue
            sections[child.tag] = child
        for required in ("presentation", "domains", "variables", "constraints"):
            if required not in sections:
                self.error("SchemaError", root, f"missing mandatory element <{required}>")

        presentation = self.presentation(sections.get("presentation"))
        domains = self.section(sections.get("domains"), "domain", "nbDomains", self.domain)
        variables = self.section(sections.get("variables"), "variable", "nbVariables", self.variable)
        relations = self.section(sections.get("relations"), "relation", "nbRelations", self.relation)
        predicates = self.section(sections.get("predicates"), "predicate", "nbPredicates", self.predicate)
        functions = self.section(sections.get("functions"), "function", "nbFunctions", self.function)

        self.domain_names = {d.name for d in domains}
        self.variable_names = {v.name for v in variables}
        self.kinds = {}
        for r in relations:
            self.kinds[r.name] = ("relation", r.arity)
        for p in predicates:
            self.kinds[p.name] = ("predicate", len(p.params))
        for f in functions:
            self.kinds[f.name] = ("function", len(f.params))

        for v in variables:
            if v.domain not in self.domain_names:
                self.error("UnknownReference", self.variable_elements[v.name],
                           f"variable {v.name!r} uses unknown domain {v.domain!r}")

        maximal_cost = initial_cost = None
        constraints = ()
        cons = sections.get("constraints")
        if cons is not None:
            try:
                maximal_cost = self.cost_attr(cons, "maximalCost", required=False)
                initial_cost = self.cost_attr(cons, "initialCost", required=False)
            except _Skip:
                pass
            constraints = self.section(cons, "constraint", "nbConstraints", self.constraint)

        quantification = None
        quant = sections.get("quantification")
        if quant is not None:
            quantification = self.section(quant, "block", "nbBlocks", self.block)

        return Instance(
            presentation=presentation,
            domains=domains,
            variables=variables,
            relations=relations,
            predicates=predicates,
            functions=functions,
            constraints=constraints,
            maximal_cost=maximal_cost,
            initial_cost=initial_cost,
            quantification=quantification,
            extensions=tuple(self.extensions),
        )

    def section(self, el, item_tag, count_attr, read_item) -> tuple:
        if el is None:
            return ()
        self.check_attributes(el)
        self.collect_extensions(el, el.tag, (item_tag,))
        items = self.children(el, (item_tag,))
        self.count(el, count_attr, len(items))
        out = []
        for index, item in enumerate(items, 1):
            self.check_attributes(item)
            try:
                out.append(read_item(item, index))
            except _Skip:
                pass
        return tuple(out)

    def presentation(self, el) -> Presentation:
        if el is None:
            return Presentation()
        self.check_attributes(el)
        self.collect_extensions(el, "presentation")
        for child in el.elements():
            if child.tag != "extension":
                self.warn("UnknownElement", child, f"unexpected element <{child.tag}> inside <presentation>")
        a = el.attrib
        fmt = a.get("format")
        if fmt is None:
            self.error("SchemaError", el, "<presentation> is missing the mandatory attribute 'format'")
            fmt = FORMAT
        elif fmt != FORMAT:
            self.warn("UnexpectedFormat", el, f"format is {fmt!r}, expected {FORMAT!r}")
        name = a.get("name")
        if name is not None and name != "?" and not is_identifier(name):
            self.warn("InvalidName", el, f"presentation name {name!r} is not an identifier")
        max_arity = None
        if "maxConstraintArity" in a:
            try:
                max_arity = self.int_attr(el, "maxConstraintArity", minimum=1)
            except _Skip:
                pass
        for claim in ("nbSolutions", "minViolatedConstraints"):
            if claim in a:
                try:
                    parse_count_claim(a[claim])
                except ValueError:
                    self.warn("InvalidAttribute", el, f"{claim}={a[claim]!r} is not a recognised count")
        if "maxSatisfiableConstraints" in a:
            self.warn("DeprecatedAttribute", el,
                      "maxSatisfiableConstraints is deprecated; use minViolatedConstraints")
        itype = InstanceType.CSP
        type_given = "type" in a
        if type_given:
            try:
                itype = InstanceType(a["type"])
            except ValueError:
                self.error("UnknownInstanceType", el, f"unknown instance type {a['type']!r}")
        return Presentation(
            format=fmt,
            name=name,
            max_constraint_arity=max_arity,
            min_violated_constraints=a.get("minViolatedConstraints"),
            nb_solutions=a.get("nbSolutions"),
            solution=a.get("solution"),
            type=itype,
            type_given=type_given,
            description=" ".join(el.text.split()),
            max_satisfiable_constraints=a.get("maxSatisfiableConstraints"),
        )

    def domain(self, el, index) -> DomainDef:
        name = self.name_attr(el)
        nb_values = self.int_attr(el, "nbValues", minimum=0)
        self.collect_extensions(el, f"domain:{name}")
        try:
            tokens = lexparse.lex_body(el.children)
            if not tokens:
                raise EmptyDomain("a domain needs at least one value", el.offset)
            pieces = lexparse.parse_domain_pieces(tokens)
            dom = DomainDef(name, tuple(pieces))
        except XCSPError as exc:
            self.lift(exc, el)
            raise _Skip from None
        if dom.nb_values != nb_values:
            self.error("CountMismatch", el, f"nbValues={nb_values} but the domain holds {dom.nb_values} values")
        return dom

    def variable(self, el, index) -> VariableDef:
        name = self.name_attr(el)
        domain = self.attr(el, "domain")
        self.variable_elements[name] = el
        self.collect_extensions(el, f"variable:{name}")
        return VariableDef(name, domain)

    def relation(self, el, index) -> Relation:
        name = self.name_attr(el)
        arity = self.int_attr(el, "arity", minimum=1)
        nb_tuples = self.int_attr(el, "nbTuples", minimum=0)
        raw_sem = self.attr(el, "semantics")
        try:
            semantics = Semantics(raw_sem)
        except ValueError:
            self.error("InvalidAttribute", el, f"semantics={raw_sem!r} is not supports, conflicts or soft")
            raise _Skip from None
        self.collect_extensions(el, f"relation:{name}")
        costs = default = None
        try:
            if semantics == Semantics.SOFT:
                default = self.cost_attr(el, "defaultCost")
                pairs = lexparse.parse_weighted_tuples(el.children, arity)
                costs = tuple(c for c, _ in pairs)
                tuples = tuple(t for _, t in pairs)
            else:
                if "defaultCost" in el.attrib:
                    self.warn("UnexpectedAttribute", el, "defaultCost is only meaningful for soft relations")
                tuples = tuple(lexparse.parse_tuples(el.children, arity))
        except XCSPError as exc:
            self.lift(exc, el)
            raise _Skip from None
        if len(tuples) != nb_tuples:
            self.error("CountMismatch", el, f"nbTuples={nb_tuples} but the relation lists {len(tuples)} tuples")
        return Relation(name, arity, semantics, tuples, costs, default)

    def formal_and_body(self, el):
        params_el = el.find("parameters")
        expr_el = el.find("expression")
        for child in el.elements():
            if child.tag not in ("parameters", "expression", "extension"):
                self.warn("UnknownElement", child, f"unexpected element <{child.tag}> inside <{el.tag}>")
        if params_el is None or expr_el is None:
            self.error("SchemaError", el, f"<{el.tag}> needs <parameters> and <expression>")
            raise _Skip
        try:
            formals = lexparse.parse_formal_parameters(params_el.children)
        except XCSPError as exc:
            self.lift(exc, params_el)
            raise _Skip from None
        functional = None
        for rep in expr_el.elements():
            if rep.tag == "functional":
                functional = rep
            elif rep.tag in _OTHER_REPRESENTATIONS:
                self.warn("UnsupportedRepresentation", rep,
                          f"<{rep.tag}> representation is ignored; only <functional> is read")
            elif rep.tag != "extension":
                self.warn("UnknownElement", rep, f"unexpected element <{rep.tag}> inside <expression>")
        if functional is None:
            self.error("SchemaError", expr_el, "<expression> has no <functional> representation")
            raise _Skip
        runs = [c for c in functional.children if isinstance(c, str)]
        text = "".join(runs)
        base = runs[0].offset if runs else functional.offset
        try:
            body = parse_functional(text, base)
        except XCSPError as exc:
            self.lift(exc, functional)
            raise _Skip from None
        return tuple(n for _, n in formals), body

    def predicate(self, el, index) -> PredicateDef:
        name = self.name_attr(el)
        self.collect_extensions(el, f"predicate:{name}")
        params, body = self.formal_and_body(el)
        return PredicateDef(name, params, body)

    def function(self, el, index) -> CostFunctionDef:
        name = self.name_attr(el)
        ret = self.attr(el, "return")
        if ret != "int":
            self.error("UnknownType", el, f"unsupported return type {ret!r}")
            raise _Skip
        self.collect_extensions(el, f"function:{name}")
        params, body = self.formal_and_body(el)
        return CostFunctionDef(name, params, body, ret)

    def constraint(self, el, index) -> ConstraintDef:
        name = self.name_attr(el)
        scope = self.scope_attr(el)
        arity = self.int_attr(el, "arity", required=False)
        reference = self.attr(el, "reference")
        self.collect_extensions(el, f"constraint:{name}")
        for v in scope:
            if v not in self.variable_names:
                self.error("UnknownReference", el, f"scope variable {v!r} is not declared")
                raise _Skip
        params_el = el.find("parameters")
        for child in el.elements():
            if child.tag not in ("parameters", "extension"):
                self.warn("UnknownElement", child, f"unexpected element <{child.tag}> inside <constraint>")
        if reference.lower().startswith(GLOBAL_PREFIX):
            parameters = self.global_parameters(el, params_el, reference, scope)
        else:
            kind = self.kinds.get(reference)
            if kind is None:
                self.error("UnknownReference", el, f"reference {reference!r} names no relation, predicate or function")
                raise _Skip
            if kind[0] == "relation":
                if params_el is not None:
                    self.error("UnexpectedParameters", params_el, "a constraint in extension has no parameters")
                    raise _Skip
                parameters = None
            elif params_el is None:
                self.warn("ImplicitParameters", el,
                          "no <parameters>; the scope is used as the effective parameter list")
                parameters = tuple(VarRef(v) for v in scope)
            else:
                try:
                    parameters = tuple(lexparse.parse_effective_parameters(params_el.children))
                except XCSPError as exc:
                    self.lift(exc, params_el)
                    raise _Skip from None
        return ConstraintDef(name, scope, reference, parameters, arity)

    def global_parameters(self, el, params_el, reference, scope):
        gname = reference[len(GLOBAL_PREFIX):]
        canonical = catalog.canonical_name(gname)
        known = catalog.signature(canonical) is not None
        if not known:
            self.warn("UnknownGlobal", el, f"global constraint {gname!r} is not recognised; parameters are kept as read")
        if params_el is None:
            if canonical == "alldifferent":
                self.warn("DeprecatedImplicitParameters", el,
                          "allDifferent without <parameters> is deprecated; the scope is used")
                return (ParamList(tuple(VarRef(v) for v in scope)),)
            self.error("SchemaError", el, f"global constraint {gname!r} needs <parameters>")
            raise _Skip
        try:
            values = lexparse.parse_param_values(params_el.children)
        except XCSPError as exc:
            self.lift(exc, params_el)
            raise _Skip from None
        if canonical == "weightedsum" and values and _old_weighted_sum(values[0]):
            self.warn("DeprecatedWeightedSumSyntax", params_el,
                      "weightedSum with a list of lists is deprecated; read as a list of dictionaries")
            values[0] = ParamList(tuple(ParamDict(((None, a), (None, b)), positional=True)
                                        for a, b in (pair.items for pair in values[0])))
        if known:
            try:
                return catalog.bind_conventional_order(canonical, values)
            except MalformedParams as exc:
                self.error("MalformedParams", params_el, str(exc))
                raise _Skip from None
        if any(catalog.has_unbound_dicts(v) for v in values):
            self.warn("UnknownConventionalOrder", params_el,
                      "positional dictionaries of an unrecognised global keep no keys")
        return tuple(values)

    def block(self, el, index) -> QuantBlock:
        raw = self.attr(el, "quantifier")
        quantifier = _QUANTIFIERS.get(raw)
        if quantifier is None:
            self.error("InvalidAttribute", el, f"quantifier={raw!r} is not exists or forall")
            raise _Skip
        if raw != quantifier:
            self.warn("QuantifierSpelling", el, f"quantifier {raw!r} read as {quantifier!r}")
        scope = self.scope_attr(el)
        if not scope:
            self.error("SchemaError", el, "a block quantifies at least one variable")
            raise _Skip
        for v in scope:
            if v not in self.variable_names:
                self.error("UnknownReference", el, f"block variable {v!r} is not declared")
                raise _Skip
        self.collect_extensions(el, f"block:{index}", ("constraint",))
        restrictions = []
        for child in self.children(el, ("constraint",)):
            self.check_attributes(child)
            try:
                restrictions.append(self.constraint(child, None))
            except _Skip:
                pass
        return QuantBlock(quantifier, scope, tuple(restrictions))


def _old_weighted_sum(value) -> bool:
    return (isinstance(value, ParamList) and len(value) > 0
            and all(isinstance(v, ParamList) and len(v) == 2 for v in value))


def load_instance(data) -> tuple[Instance, list[Diagnostic]]:
    """Parse a document (bytes or str).

    Returns ``(instance, warnings)``; raises :class:`LoadError` carrying
    every diagnostic when any error is found.
    """
    root = xmltree.parse(data)
    reader = _Reader(root)
    instance = reader.read()
    if instance is None or any(d.severity == ERROR for d in reader.diags):
        raise LoadError(reader.diags)
    return instance, reader.diags


def load_file(path) -> tuple[Instance, list[Diagnostic]]:
    return load_instance(Path(path).read_bytes())


def load(data) -> Instance:
    """Like :func:`load_instance` but drops the warnings."""
    return load_instance(data)[0]


# -- writing -----------------------------------------------------------------------

_WRAP_ABOVE = 20
_PER_LINE = 10


def _attr(value) -> str:
    return escape(str(value), {'"': "&quot;"})


def _attrs(pairs) -> str:
    return "".join(f' {k}="{_attr(v)}"' for k, v in pairs if v is not None)


class _Writer:
    def __init__(self, instance: Instance, notation: Notation):
        self.inst = instance
        self.tagged = Notation(notation) == Notation.TAGGED
        self.lines: list[str] = []
        self.ext: dict[str, list[str]] = {}
        for owner, raw in instance.extensions:
            self.ext.setdefault(owner, []).append(raw)

    def emit(self, depth, text):
        self.lines.append("  " * depth + text)

    def element(self, depth, tag, attrs, body=(), owner=None, inline=None):
        """Write one element; ``body`` is a list of pre-indented lines."""
        head = f"<{tag}{_attrs(attrs)}"
        extras = self.ext.get(owner, []) if owner else []
        if inline is not None and not extras:
            self.emit(depth, f"{head}>{inline}</{tag}>")
            return
        if not body and not extras and not inline:
            self.emit(depth, head + "/>")
            return
        self.emit(depth, head + ">")
        if inline:
            self.emit(depth + 1, inline)
        for depth_offset, line in body:
            self.emit(depth + 1 + depth_offset, line)
        for raw in extras:
            self.emit(depth + 1, raw)
        self.emit(depth, f"</{tag}>")

    # -- values ----------------------------------------------------------------

    def value(self, v, gname=None, order=None) -> str:
        if isinstance(v, bool):
            return "<true/>" if v else "<false/>"
        if isinstance(v, int):
            return f"<i>{v}</i>" if self.tagged else str(v)
        if isinstance(v, VarRef):
            return f'<var name="{_attr(v.name)}"/>' if self.tagged else v.name
        if isinstance(v, Atom):
            return f"<{v.op}/>"
        if isinstance(v, Nil):
            return "<nil/>"
        if isinstance(v, Infinity):
            return "<infinity/>"
        if isinstance(v, ParamList):
            inner = " ".join(self.value(x, gname, order) for x in v.items)
            return f"<list>{inner}</list>" if self.tagged else f"[ {inner} ]" if inner else "[ ]"
        if isinstance(v, ParamDict):
            return self.dict_value(v, gname, order)
        raise TypeError(f"cannot write parameter value {v!r}")

    def dict_value(self, d: ParamDict, gname, order) -> str:
        if not d.keyed:
            inner = " ".join(self.value(x) for x in d.values())
            return "{" + inner + "}"
        if self.tagged:
            entries = "".join(f'<entry key="{_attr(k)}">{self.value(v)}</entry>' for k, v in d.entries)
            return f"<dict>{entries}</dict>"
        if order is not None and set(d.keys()) <= set(order):
            return "{" + " ".join(self.value(d.get(k, NIL)) for k in order) + "}"
        return "{" + " ".join(f"/{k} {self.value(v)}" for k, v in d.entries) + "}"

    def global_params(self, c: ConstraintDef) -> str:
        name = catalog.canonical_name(c.global_name)
        parts = []
        for i, v in enumerate(c.parameters):
            parts.append(self.value(v, name, catalog.key_order(name, i)))
        return " ".join(parts)

    # -- sections --------------------------------------------------------------

    def write(self) -> bytes:
        inst = self.inst
        self.emit(0, '<?xml version="1.0" encoding="UTF-8"?>')
        self.emit(0, "<instance>")
        self.presentation(inst.presentation)
        self.section("domains", "nbDomains", inst.domains, self.domain, True)
        self.section("variables", "nbVariables", inst.variables, self.variable, True)
        self.section("relations", "nbRelations", inst.relations, self.relation)
        self.section("predicates", "nbPredicates", inst.predicates, self.predicate)
        self.section("functions", "nbFunctions", inst.functions, self.function)
        self.constraints()
        if inst.quantification is not None:
            self.open_section("quantification", [("nbBlocks", len(inst.quantification))])
            for index, block in enumerate(inst.quantification, 1):
                self.block(block, index)
            self.close_section("quantification")
        for raw in self.ext.get("instance", []):
            self.emit(1, raw)
        self.emit(0, "</instance>")
        return ("\n".join(self.lines) + "\n").encode("utf-8")

    def presentation(self, p: Presentation):
        show_type = p.type_given or p.type != InstanceType.CSP
        attrs = [
            ("name", p.name),
            ("maxConstraintArity", p.max_constraint_arity),
            ("minViolatedConstraints", p.min_violated_constraints),
            ("nbSolutions", p.nb_solutions),
            ("solution", p.solution),
            ("maxSatisfiableConstraints", p.max_satisfiable_constraints),
            ("type", p.type.value if show_type else None),
            ("format", p.format),
        ]
        body = [(0, escape(p.description))] if p.description else []
        self.element(1, "presentation", attrs, body, owner="presentation")

    def open_section(self, tag, attrs):
        self.emit(1, f"<{tag}{_attrs(attrs)}>")

    def close_section(self, tag):
        for raw in self.ext.get(tag, []):
            self.emit(2, raw)
        self.emit(1, f"</{tag}>")

    def section(self, tag, count_attr, items, write_item, mandatory=False):
        if not items and not mandatory and tag not in self.ext:
            return
        self.open_section(tag, [(count_attr, len(items))])
        for item in items:
            write_item(item)
        self.close_section(tag)

    def domain(self, d: DomainDef):
        if self.tagged:
            parts = [f'<interval min="{p[0]}" max="{p[1]}"/>' if isinstance(p, tuple) else f"<i>{p}</i>"
                     for p in d.pieces]
        else:
            parts = [f"{p[0]}..{p[1]}" if isinstance(p, tuple) else str(p) for p in d.pieces]
        self.element(2, "domain", [("name", d.name), ("nbValues", d.nb_values)],
                     owner=f"domain:{d.name}", inline=" ".join(parts))

    def variable(self, v: VariableDef):
        self.element(2, "variable", [("name", v.name), ("domain", v.domain)], owner=f"variable:{v.name}")

    def tuple_text(self, t) -> str:
        if self.tagged:
            return "<tuple>" + "".join(f"<i>{x}</i>" for x in t) + "</tuple>"
        return " ".join(str(x) for x in t)

    def relation(self, r: Relation):
        attrs = [("name", r.name), ("arity", r.arity), ("nbTuples", r.nb_tuples),
                 ("semantics", r.semantics.value)]
        if r.soft:
            attrs.append(("defaultCost", format_cost(r.default_cost)))
        body = self.soft_body(r) if r.soft else self.hard_body(r)
        self.element(2, "relation", attrs, body, owner=f"relation:{r.name}")

    def hard_body(self, r: Relation):
        if self.tagged:
            return [(0, self.tuple_text(t)) for t in r.tuples]
        return self.abridged_groups([self.tuple_text(t) for t in r.tuples])

    def abridged_groups(self, groups):
        if not groups:
            return []
        if len(groups) <= _WRAP_ABOVE:
            return [(0, "|".join(groups))]
        lines = []
        for start in range(0, len(groups), _PER_LINE):
            chunk = "|".join(groups[start:start + _PER_LINE])
            last = start + _PER_LINE >= len(groups)
            lines.append((0, chunk if last else chunk + "|"))
        return lines

    def soft_body(self, r: Relation):
        if self.tagged:
            lines = []
            current = object()
            for cost, t in zip(r.costs, r.tuples):
                if cost != current:
                    if lines:
                        lines.append((0, "</weight>"))
                    lines.append((0, f'<weight value="{format_cost(cost)}">'))
                    current = cost
                lines.append((1, self.tuple_text(t)))
            if lines:
                lines.append((0, "</weight>"))
            return lines
        groups = []
        previous = None
        for i, (cost, t) in enumerate(zip(r.costs, r.tuples)):
            text = self.tuple_text(t)
            if i == 0 or cost != previous:
                prefix = "<infinity/>" if cost == INFINITY else str(cost)
                text = f"{prefix}:{text}"
            previous = cost
            groups.append(text)
        return self.abridged_groups(groups)

    def formal_lines(self, params):
        if self.tagged:
            text = "".join(f'<parameter name="{_attr(p)}" type="int"/>' for p in params)
        else:
            text = " ".join(f"int {p}" for p in params)
        return [(0, f"<parameters>{text}</parameters>" if text else "<parameters/>"),
                (0, "<expression>")]

    def predicate(self, p: PredicateDef):
        body = self.formal_lines(p.params)
        body.append((1, f"<functional>{to_functional(p.body)}</functional>"))
        body.append((0, "</expression>"))
        self.element(2, "predicate", [("name", p.name)], body, owner=f"predicate:{p.name}")

    def function(self, f: CostFunctionDef):
        body = self.formal_lines(f.params)
        body.append((1, f"<functional>{to_functional(f.body)}</functional>"))
        body.append((0, "</expression>"))
        self.element(2, "function", [("name", f.name), ("return", f.return_type)], body,
                     owner=f"function:{f.name}")

    def constraints(self):
        inst = self.inst
        attrs = [("nbConstraints", len(inst.constraints))]
        if inst.initial_cost is not None:
            attrs.append(("initialCost", format_cost(inst.initial_cost)))
        if inst.maximal_cost is not None:
            attrs.append(("maximalCost", format_cost(inst.maximal_cost)))
        self.open_section("constraints", attrs)
        for c in inst.constraints:
            self.constraint(c, 2)
        self.close_section("constraints")

    def constraint(self, c: ConstraintDef, depth):
        attrs = [("name", c.name), ("arity", c.arity), ("scope", " ".join(c.scope)),
                 ("reference", c.reference)]
        body = []
        if c.parameters is not None:
            if c.is_global:
                text = self.global_params(c)
            else:
                text = " ".join(self.value(p) for p in c.parameters)
            body = [(0, f"<parameters>{text}</parameters>" if text else "<parameters/>")]
        self.element(depth, "constraint", attrs, body, owner=f"constraint:{c.name}")

    def block(self, b: QuantBlock, index):
        owner = f"block:{index}"
        attrs = [("quantifier", b.quantifier), ("scope", " ".join(b.scope))]
        extras = self.ext.get(owner, [])
        if not b.restrictions and not extras:
            self.emit(2, f"<block{_attrs(attrs)}/>")
            return
        self.emit(2, f"<block{_attrs(attrs)}>")
        for c in b.restrictions:
            self.constraint(c, 3)
        for raw in extras:
            self.emit(3, raw)
        self.emit(2, "</block>")


def write_instance(instance: Instance, notation=Notation.ABRIDGED) -> bytes:
    """Serialise ``instance``; the output depends only on its arguments."""
    return _Writer(instance, notation).write()


def convert(data, target) -> bytes:
    """Re-emit a document in the ``target`` notation."""
    return write_instance(load(data), target)
