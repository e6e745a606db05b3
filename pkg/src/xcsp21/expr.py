"""The functional expression language used by predicates and cost functions.

Expressions are prefix calls such as ``and(ne(X,Y),ne(abs(sub(X,Y)),Z))``.
:func:`parse_functional` builds a typed tree, :func:`typecheck` checks it
against a list of formal parameters, and :func:`evaluate` computes its
value under integer bindings.

Integer division truncates toward zero and the remainder takes the sign
of the dividend (``div(-7,2) == -3``, ``mod(-7,2) == -1``).  All integer
results must fit in a signed 64-bit word.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

from .errors import (
    ArithmeticOverflow,
    DivisionByZero,
    ExprSyntaxError,
    NegativeExponent,
    ReservedName,
    TypeMismatch,
    UnboundParameter,
    UnusedParameter,
    WrongArity,
)

INT = "int"
BOOL = "bool"

INT_MIN = -(2 ** 63)
INT_MAX = 2 ** 63 - 1

# op -> (result type, argument types)
SIGNATURES: dict[str, tuple[str, tuple[str, ...]]] = {
    "neg": (INT, (INT,)),
    "abs": (INT, (INT,)),
    "add": (INT, (INT, INT)),
    "sub": (INT, (INT, INT)),
    "mul": (INT, (INT, INT)),
    "div": (INT, (INT, INT)),
    "mod": (INT, (INT, INT)),
    "pow": (INT, (INT, INT)),
    "min": (INT, (INT, INT)),
    "max": (INT, (INT, INT)),
    "if": (INT, (BOOL, INT, INT)),
    "eq": (BOOL, (INT, INT)),
    "ne": (BOOL, (INT, INT)),
    "ge": (BOOL, (INT, INT)),
    "gt": (BOOL, (INT, INT)),
    "le": (BOOL, (INT, INT)),
    "lt": (BOOL, (INT, INT)),
    "not": (BOOL, (BOOL,)),
    "and": (BOOL, (BOOL, BOOL)),
    "or": (BOOL, (BOOL, BOOL)),
    "xor": (BOOL, (BOOL, BOOL)),
    "iff": (BOOL, (BOOL, BOOL)),
}

RESERVED = frozenset(SIGNATURES) | {"true", "false"}


@dataclass(frozen=True)
class IntConst:
    value: int
    type = INT


@dataclass(frozen=True)
class BoolConst:
    value: bool
    type = BOOL


@dataclass(frozen=True)
class ParamRef:
    name: str
    type = INT


@dataclass(frozen=True)
class Apply:
    op: str
    args: tuple

    @property
    def type(self) -> str:
        return SIGNATURES[self.op][0]


Expr = Union[IntConst, BoolConst, ParamRef, Apply]


def param_refs(node: Expr) -> set[str]:
    if isinstance(node, ParamRef):
        return {node.name}
    if isinstance(node, Apply):
        out: set[str] = set()
        for a in node.args:
            out |= param_refs(a)
        return out
    return set()


# -- parsing --------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<int>[+-]?\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<p>[(),]))")


class _Parser:
    def __init__(self, text: str, base: int):
        self.text = text
        self.base = base
        self.tokens = []
        pos = 0
        while True:
            m = _TOKEN.match(text, pos)
            if m is None:
                rest = text[pos:]
                if rest.strip() == "":
                    break
                bad = pos + len(rest) - len(rest.lstrip())
                raise ExprSyntaxError(f"unexpected character {text[bad]!r}", base + bad)
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), base + m.start(kind)))
            pos = m.end()
        self.i = 0

    def _end(self):
        return self.base + max(len(self.text.rstrip()) - 1, 0)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, what):
        tok = self.peek()
        if tok is None:
            raise ExprSyntaxError(f"expected {what}, got end of expression", self._end())
        self.i += 1
        return tok

    def expect(self, punct):
        tok = self.take(repr(punct))
        if tok[0] != "p" or tok[1] != punct:
            raise ExprSyntaxError(f"expected {punct!r}, got {tok[1]!r}", tok[2])
        return tok

    def expression(self):
        kind, text, offset = self.take("an expression")
        if kind == "int":
            return IntConst(int(text))
        if kind == "p":
            raise ExprSyntaxError(f"unexpected {text!r}", offset)
        nxt = self.peek()
        calling = nxt is not None and nxt[0] == "p" and nxt[1] == "("
        if text in ("true", "false"):
            if calling:
                raise ExprSyntaxError(f"{text} is a constant, not a function", offset)
            return BoolConst(text == "true")
        if text not in SIGNATURES:
            if calling:
                raise ExprSyntaxError(f"unknown operator {text!r}", offset)
            return ParamRef(text)
        if not calling:
            raise ReservedName(f"operator name {text!r} used as a parameter", offset)
        self.expect("(")
        args = []
        arg_offsets = []
        if not (self.peek() and self.peek()[1] == ")"):
            while True:
                tok = self.peek()
                arg_offsets.append(tok[2] if tok else self._end())
                args.append(self.expression())
                sep = self.take("',' or ')'")
                if sep[1] == ")":
                    break
                if sep[1] != ",":
                    raise ExprSyntaxError(f"expected ',' or ')', got {sep[1]!r}", sep[2])
        else:
            self.expect(")")
        result, expected = SIGNATURES[text]
        if len(args) != len(expected):
            raise WrongArity(f"{text} takes {len(expected)} argument(s), got {len(args)}", offset)
        for index, (arg, want) in enumerate(zip(args, expected)):
            if arg.type != want:
                raise TypeMismatch(
                    f"argument {index} of {text} must be {want}, got {arg.type}", arg_offsets[index])
        return Apply(text, tuple(args))

    def parse(self):
        node = self.expression()
        tok = self.peek()
        if tok is not None:
            raise ExprSyntaxError(f"trailing input {tok[1]!r}", tok[2])
        return node


def parse_functional(text: str, offset: int = 0) -> Expr:
    """Parse a functional expression; ``offset`` shifts reported positions."""
    if not text.strip():
        raise ExprSyntaxError("empty expression", offset)
    return _Parser(text, offset).parse()


def to_functional(node: Expr) -> str:
    if isinstance(node, IntConst):
        return str(node.value)
    if isinstance(node, BoolConst):
        return "true" if node.value else "false"
    if isinstance(node, ParamRef):
        return node.name
    return f"{node.op}({','.join(to_functional(a) for a in node.args)})"


def typecheck(node: Expr, formals, strict: bool = False) -> str:
    """Return the root type (``"int"`` or ``"bool"``) of ``node``.

    ``formals`` lists parameter names (or ``(type, name)`` pairs).  With
    ``strict=True`` every formal parameter must also occur in the body.
    """
    names = [f[1] if isinstance(f, tuple) else f for f in formals]
    declared = set(names)
    _check_types(node)
    used = param_refs(node)
    for name in sorted(used - declared):
        raise UnboundParameter(name)
    if strict:
        for name in names:
            if name not in used:
                raise UnusedParameter(name)
    return node.type


def _check_types(node):
    if isinstance(node, Apply):
        sig = SIGNATURES.get(node.op)
        if sig is None:
            raise ExprSyntaxError(f"unknown operator {node.op!r}")
        result, expected = sig
        if len(node.args) != len(expected):
            raise WrongArity(f"{node.op} takes {len(expected)} argument(s), got {len(node.args)}")
        for index, (arg, want) in enumerate(zip(node.args, expected)):
            _check_types(arg)
            if arg.type != want:
                raise TypeMismatch(f"argument {index} of {node.op} must be {want}, got {arg.type}")


# -- evaluation -------------------------------------------------------------------

def _checked(value: int) -> int:
    if value < INT_MIN or value > INT_MAX:
        raise ArithmeticOverflow(f"{value} does not fit in 64 bits")
    return value


def int_div(a: int, b: int) -> int:
    """Quotient truncated toward zero."""
    if b == 0:
        raise DivisionByZero(f"div({a},0)")
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def int_mod(a: int, b: int) -> int:
    """Remainder with the sign of the dividend, so a == b*div(a,b) + mod(a,b)."""
    if b == 0:
        raise DivisionByZero(f"mod({a},0)")
    return a - b * int_div(a, b)


def int_pow(a: int, b: int) -> int:
    if b < 0:
        raise NegativeExponent(f"pow({a},{b})")
    if abs(a) > 1 and b > 64:
        raise ArithmeticOverflow(f"pow({a},{b}) does not fit in 64 bits")
    return a ** b


_BINARY_INT = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": int_div,
    "mod": int_mod,
    "pow": int_pow,
    "min": min,
    "max": max,
}

_RELATIONAL = {
    "eq": lambda a, b: a == b,
    "ne": lambda a, b: a != b,
    "ge": lambda a, b: a >= b,
    "gt": lambda a, b: a > b,
    "le": lambda a, b: a <= b,
    "lt": lambda a, b: a < b,
}

_LOGICAL = {
    "and": lambda a, b: a and b,
    "or": lambda a, b: a or b,
    "xor": lambda a, b: a != b,
    "iff": lambda a, b: a == b,
}


def evaluate(node: Expr, bindings: Mapping[str, int]):
    """Value of ``node`` (an int or a bool) under ``bindings``.

    ``if`` evaluates only the selected branch; the binary logical
    operators evaluate both operands.
    """
    if isinstance(node, IntConst):
        return _checked(node.value)
    if isinstance(node, ParamRef):
        try:
            return _checked(bindings[node.name])
        except KeyError:
            raise UnboundParameter(node.name) from None
    if isinstance(node, BoolConst):
        return node.value
    op = node.op
    args = node.args
    if op == "if":
        chosen = args[1] if evaluate(args[0], bindings) else args[2]
        return evaluate(chosen, bindings)
    if op in _BINARY_INT:
        return _checked(_BINARY_INT[op](evaluate(args[0], bindings), evaluate(args[1], bindings)))
    if op in _RELATIONAL:
        return _RELATIONAL[op](evaluate(args[0], bindings), evaluate(args[1], bindings))
    if op in _LOGICAL:
        left = evaluate(args[0], bindings)
        right = evaluate(args[1], bindings)
        return _LOGICAL[op](left, right)
    if op == "neg":
        return _checked(-evaluate(args[0], bindings))
    if op == "abs":
        return _checked(abs(evaluate(args[0], bindings)))
    if op == "not":
        return not evaluate(args[0], bindings)
    raise ExprSyntaxError(f"unknown operator {op!r}")
