"""Tokenizer and micro-parsers for element bodies.

Bodies may be written in abridged notation (``1..3 7``, ``0 1|2 3``,
``[ {1 V0} ] <gt/> 12``), in tagged notation (``<interval .../>``,
``<tuple><i>0</i>...</tuple>``, ``<list>``, ``<dict>``...) or in any mix of
the two.  :func:`lex_body` flattens such mixed content into one token
stream in which every tagged construct has been replaced by the tokens of
its abridged equivalent, so the parsers below only deal with tokens.

Every public ``parse_*`` function also accepts a plain string.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    ArityMismatch,
    DanglingKey,
    DuplicateKey,
    DuplicateParameter,
    EmptyDomain,
    InvertedInterval,
    LexError,
    MissingFirstCost,
    MixedDictStyle,
    NegativeCost,
    UnbalancedBrace,
    UnbalancedBracket,
    UnknownType,
)
from .model import (
    INFINITY,
    NIL,
    RELATIONAL_ATOMS,
    Atom,
    Infinity,
    ParamDict,
    ParamList,
    VarRef,
    is_identifier,
)

# token kinds
INTEGER = "Integer"
IDENTIFIER = "Identifier"
LBRACKET = "LBracket"
RBRACKET = "RBracket"
LBRACE = "LBrace"
RBRACE = "RBrace"
SLASHKEY = "SlashKey"
PIPE = "Pipe"
COLON = "Colon"
DOTDOT = "DotDot"
ATOM = "Atom"
NIL_TOKEN = "Nil"
INFINITY_TOKEN = "Infinity"
TRUE = "True"
FALSE = "False"
# produced only by tagged elements
TUPLE_OPEN = "TupleOpen"
TUPLE_CLOSE = "TupleClose"
WEIGHT_OPEN = "WeightOpen"
WEIGHT_CLOSE = "WeightClose"


@dataclass(frozen=True)
class Token:
    kind: str
    lexeme: str
    offset: int
    value: object = None

    def __repr__(self):
        if self.value is not None and self.kind != INTEGER:
            return f"{self.kind}({self.value})"
        return f"{self.kind}({self.lexeme})" if self.lexeme else self.kind


_WS = " \t\n\r"
_TEXT_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\n\r]+)
  | (?P<int>[+-]?[0-9]+)(?![A-Za-z0-9_+-])
  | (?P<dotdot>\.\.)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)(?![+-])
  | (?P<key>/[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[\[\]{}|:])
    """,
    re.X,
)
_PUNCT = {"[": LBRACKET, "]": RBRACKET, "{": LBRACE, "}": RBRACE, "|": PIPE, ":": COLON}


def _lex_text(text: str, base: int, out: list) -> None:
    pos = 0
    n = len(text)
    while pos < n:
        m = _TEXT_TOKEN.match(text, pos)
        if m is None:
            ch = text[pos]
            if ch == "/":
                raise LexError("'/' must be immediately followed by a key", base + pos)
            raise LexError(f"unexpected character {ch!r}", base + pos)
        kind = m.lastgroup
        lexeme = m.group(kind)
        offset = base + pos
        if kind == "int":
            out.append(Token(INTEGER, lexeme, offset, int(lexeme)))
        elif kind == "id":
            out.append(Token(IDENTIFIER, lexeme, offset, lexeme))
        elif kind == "key":
            out.append(Token(SLASHKEY, lexeme, offset, lexeme[1:]))
        elif kind == "dotdot":
            out.append(Token(DOTDOT, lexeme, offset))
        elif kind == "punct":
            out.append(Token(_PUNCT[lexeme], lexeme, offset))
        pos = m.end()


_ATOM_ELEMENTS = set(RELATIONAL_ATOMS)


def _element_int(text: str, what: str, offset: int) -> int:
    try:
        return int(text.strip())
    except (ValueError, AttributeError):
        raise LexError(f"{what} must be an integer, got {text!r}", offset) from None


def _element_text(el) -> str:
    parts = []
    for child in el.children:
        if isinstance(child, str):
            parts.append(child)
        else:
            raise LexError(f"unexpected <{child.tag}> inside <{el.tag}>", child.offset)
    return "".join(parts)


def _lex_element(el, out: list) -> None:
    tag = el.tag
    off = el.offset
    if tag == "extension":
        return
    if tag in _ATOM_ELEMENTS:
        out.append(Token(ATOM, f"<{tag}/>", off, tag))
    elif tag == "nil":
        out.append(Token(NIL_TOKEN, "<nil/>", off))
    elif tag == "infinity":
        out.append(Token(INFINITY_TOKEN, "<infinity/>", off))
    elif tag == "true":
        out.append(Token(TRUE, "<true/>", off, True))
    elif tag == "false":
        out.append(Token(FALSE, "<false/>", off, False))
    elif tag == "i":
        value = _element_int(_element_text(el), "<i> content", off)
        out.append(Token(INTEGER, str(value), off, value))
    elif tag == "var":
        name = el.attrib.get("name", "")
        if not is_identifier(name):
            raise LexError(f"<var> needs a valid name attribute, got {name!r}", off)
        out.append(Token(IDENTIFIER, name, off, name))
    elif tag == "interval":
        lo = _element_int(el.attrib.get("min"), "interval min", off)
        hi = _element_int(el.attrib.get("max"), "interval max", off)
        out.append(Token(INTEGER, str(lo), off, lo))
        out.append(Token(DOTDOT, "..", off))
        out.append(Token(INTEGER, str(hi), off, hi))
    elif tag == "parameter":
        name = el.attrib.get("name", "")
        ptype = el.attrib.get("type", "")
        if not is_identifier(name) or not is_identifier(ptype):
            raise LexError("<parameter> needs name and type attributes", off)
        out.append(Token(IDENTIFIER, ptype, off, ptype))
        out.append(Token(IDENTIFIER, name, off, name))
    elif tag == "list":
        out.append(Token(LBRACKET, "<list>", off))
        _lex_children(el.children, out)
        out.append(Token(RBRACKET, "</list>", off))
    elif tag == "dict":
        out.append(Token(LBRACE, "<dict>", off))
        for child in el.children:
            if isinstance(child, str):
                if child.strip(_WS):
                    raise LexError("text is not allowed directly inside <dict>", _offset_of(child, off))
            elif child.tag == "entry":
                key = child.attrib.get("key", "")
                if not is_identifier(key):
                    raise LexError(f"<entry> needs a valid key attribute, got {key!r}", child.offset)
                out.append(Token(SLASHKEY, "/" + key, child.offset, key))
                _lex_children(child.children, out)
            elif child.tag != "extension":
                raise LexError(f"only <entry> is allowed inside <dict>, got <{child.tag}>", child.offset)
        out.append(Token(RBRACE, "</dict>", off))
    elif tag == "tuple":
        out.append(Token(TUPLE_OPEN, "<tuple>", off))
        _lex_children(el.children, out)
        out.append(Token(TUPLE_CLOSE, "</tuple>", off))
    elif tag == "weight":
        raw = el.attrib.get("value")
        if raw is None:
            raise LexError("<weight> needs a value attribute", off)
        if raw.strip() == "infinity":
            value = INFINITY
        else:
            value = _element_int(raw, "weight value", off)
        out.append(Token(WEIGHT_OPEN, "<weight>", off, value))
        _lex_children(el.children, out)
        out.append(Token(WEIGHT_CLOSE, "</weight>", off))
    else:
        raise LexError(f"unexpected element <{tag}>", off)


def _offset_of(item, fallback: int) -> int:
    return getattr(item, "offset", fallback)


def _lex_children(children: Iterable, out: list, base: int = 0) -> None:
    running = base
    for item in children:
        if isinstance(item, str):
            start = _offset_of(item, running)
            _lex_text(item, start, out)
            running = start + len(item)
        else:
            _lex_element(item, out)


def _check_intervals(tokens: list) -> None:
    for i, tok in enumerate(tokens):
        if tok.kind != DOTDOT:
            continue
        before = tokens[i - 1] if i > 0 else None
        after = tokens[i + 1] if i + 1 < len(tokens) else None
        if before is None or before.kind != INTEGER or after is None or after.kind != INTEGER:
            raise LexError("'..' must join two integers", tok.offset)


def lex_body(content) -> list[Token]:
    """Tokenize a body given as text or as mixed content.

    ``content`` is a string or a sequence whose items are strings (text
    runs) and element nodes (objects with ``tag``, ``attrib``,
    ``children`` and ``offset``).  Text runs may carry an ``offset``
    attribute giving their absolute position; otherwise offsets count
    characters from the start of the first run.
    """
    out: list[Token] = []
    if isinstance(content, str):
        content = [content]
    _lex_children(content, out)
    _check_intervals(out)
    return out


def _tokens(source) -> list[Token]:
    if isinstance(source, list) and all(isinstance(t, Token) for t in source):
        return source
    return lex_body(source)


def _end_offset(source, tokens: Sequence[Token]) -> int:
    if isinstance(source, str):
        return max(len(source) - 1, 0)
    return tokens[-1].offset if tokens else 0


# -- domains -------------------------------------------------------------------

def parse_domain_pieces(source) -> list:
    """Pieces (ints and ``(lo, hi)`` pairs) in written order."""
    tokens = _tokens(source)
    if not tokens:
        raise EmptyDomain("a domain needs at least one value", 0)
    pieces: list = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok.kind != INTEGER:
            raise LexError(f"expected an integer or interval, got {tok!r}", tok.offset)
        if i + 1 < len(tokens) and tokens[i + 1].kind == DOTDOT:
            hi = tokens[i + 2]
            if tok.value > hi.value:
                raise InvertedInterval(f"interval {tok.value}..{hi.value} has min > max", tok.offset)
            pieces.append((tok.value, hi.value))
            i += 3
        else:
            pieces.append(tok.value)
            i += 1
    return pieces


def expand_pieces(pieces) -> list[int]:
    values = set()
    for p in pieces:
        if isinstance(p, tuple):
            values.update(range(p[0], p[1] + 1))
        else:
            values.add(p)
    return sorted(values)


def parse_domain_values(text) -> tuple[list, list[int]]:
    """Return ``(raw_pieces, expanded_values)`` for a domain body.

    >>> parse_domain_values("1..3 7")[1]
    [1, 2, 3, 7]
    """
    if isinstance(text, str) and not text.strip(_WS):
        raise EmptyDomain("a domain needs at least one value", 0)
    pieces = parse_domain_pieces(text)
    return pieces, expand_pieces(pieces)


# -- tuples ----------------------------------------------------------------------

class _TupleReader:
    def __init__(self, tokens, arity, weighted, end_offset):
        if arity < 1:
            raise ValueError("arity must be at least 1")
        self.tokens = tokens
        self.arity = arity
        self.weighted = weighted
        self.end_offset = end_offset
        self.out = []
        self.group: list[int] = []
        self.group_offset = None
        self.prefix = None
        self.current = None
        self.weights: list = []
        self.in_tag = False
        self.after_pipe = None

    def _flush(self, offset):
        index = len(self.out)
        start = self.group_offset if self.group_offset is not None else offset
        if not self.group:
            raise ArityMismatch(f"tuple {index} is empty", start, index)
        if len(self.group) != self.arity:
            raise ArityMismatch(
                f"tuple {index} has {len(self.group)} values, expected {self.arity}", start, index)
        cost = None
        if self.weighted:
            if self.prefix is not None:
                self.current = self.prefix
            elif self.weights and self.weights[-1] is not None:
                self.current = self.weights[-1]
            if self.current is None:
                raise MissingFirstCost("the first tuple must be given an explicit cost", start)
            cost = self.current
        self.out.append((cost, tuple(self.group)))
        self.group = []
        self.group_offset = None
        self.prefix = None
        self.after_pipe = None

    def _set_prefix(self, cost, tok):
        if not self.weighted:
            raise LexError("cost prefix in a relation without costs", tok.offset)
        if self.group or self.prefix is not None:
            raise LexError("cost prefix must precede a tuple", tok.offset)
        if cost != INFINITY and cost < 0:
            raise NegativeCost(f"negative cost {cost}", tok.offset)
        self.prefix = cost
        self.group_offset = tok.offset

    def run(self):
        toks = self.tokens
        i = 0
        n = len(toks)
        while i < n:
            tok = toks[i]
            kind = tok.kind
            nxt = toks[i + 1] if i + 1 < n else None
            if kind == INTEGER:
                if nxt is not None and nxt.kind == COLON:
                    self._set_prefix(tok.value, tok)
                    i += 2
                    continue
                if self.group_offset is None:
                    self.group_offset = tok.offset
                self.group.append(tok.value)
            elif kind == INFINITY_TOKEN:
                if nxt is None or nxt.kind != COLON:
                    raise LexError("<infinity/> must be followed by ':' in a cost prefix", tok.offset)
                self._set_prefix(INFINITY, tok)
                i += 2
                continue
            elif kind == PIPE:
                if self.in_tag:
                    raise LexError("'|' inside <tuple>", tok.offset)
                prev = toks[i - 1].kind if i else None
                if not self.group and self.prefix is None and prev in (TUPLE_CLOSE, WEIGHT_CLOSE):
                    i += 1
                    continue
                self._flush(tok.offset)
                self.after_pipe = tok
            elif kind == TUPLE_OPEN:
                if self.group or self.in_tag:
                    raise LexError("<tuple> must start a new tuple", tok.offset)
                self.in_tag = True
                self.after_pipe = None
                if self.group_offset is None:
                    self.group_offset = tok.offset
            elif kind == TUPLE_CLOSE:
                self.in_tag = False
                self._flush(tok.offset)
            elif kind == WEIGHT_OPEN:
                if not self.weighted:
                    raise LexError("<weight> in a relation without costs", tok.offset)
                if self.group or self.prefix is not None:
                    raise LexError("<weight> must start a new tuple", tok.offset)
                if tok.value < 0:
                    raise NegativeCost(f"negative cost {tok.value}", tok.offset)
                self.weights.append(tok.value)
            elif kind == WEIGHT_CLOSE:
                if self.group:
                    self._flush(tok.offset)
                self.weights.pop()
            else:
                raise LexError(f"unexpected {tok!r} in a tuple list", tok.offset)
            i += 1
        if self.group or self.prefix is not None:
            self._flush(self.end_offset)
        elif self.after_pipe is not None:
            raise ArityMismatch(f"tuple {len(self.out)} is empty", self.after_pipe.offset, len(self.out))
        return self.out


def parse_tuples(source, arity: int) -> list[tuple]:
    """Parse a ``|``-separated tuple list of the given arity.

    >>> parse_tuples("0 1|2 3", 2)
    [(0, 1), (2, 3)]
    """
    tokens = _tokens(source)
    reader = _TupleReader(tokens, arity, False, _end_offset(source, tokens))
    return [t for _, t in reader.run()]


def parse_weighted_tuples(source, arity: int) -> list[tuple]:
    """Parse tuples with ``cost:`` prefixes; returns ``(cost, tuple)`` pairs.

    A tuple without a prefix inherits the cost of the previous one.
    """
    tokens = _tokens(source)
    reader = _TupleReader(tokens, arity, True, _end_offset(source, tokens))
    return reader.run()


def serialize_tuples(tuples) -> str:
    return "|".join(" ".join(str(v) for v in t) for t in tuples)


# -- parameters -------------------------------------------------------------------

def parse_formal_parameters(source) -> list[tuple[str, str]]:
    """``"int X int Y"`` -> ``[("int", "X"), ("int", "Y")]``."""
    tokens = _tokens(source)
    out: list[tuple[str, str]] = []
    seen = set()
    for tok in tokens:
        if tok.kind != IDENTIFIER:
            raise LexError(f"unexpected {tok!r} in formal parameters", tok.offset)
    if len(tokens) % 2:
        raise LexError("formal parameter type without a name", tokens[-1].offset)
    for ttok, ntok in zip(tokens[::2], tokens[1::2]):
        if ttok.value != "int":
            raise UnknownType(f"unknown parameter type {ttok.value!r}", ttok.offset)
        if ntok.value in seen:
            raise DuplicateParameter(f"formal parameter {ntok.value!r} declared twice", ntok.offset)
        seen.add(ntok.value)
        out.append((ttok.value, ntok.value))
    return out


def parse_effective_parameters(source) -> list:
    """Integers and variable references, e.g. ``"V0 V1 1"``."""
    out = []
    for tok in _tokens(source):
        if tok.kind == INTEGER:
            out.append(tok.value)
        elif tok.kind == IDENTIFIER:
            out.append(VarRef(tok.value))
        else:
            raise LexError(f"effective parameters are integers or variables, got {tok!r}", tok.offset)
    return out


class _ValueReader:
    def __init__(self, tokens, end_offset):
        self.tokens = tokens
        self.i = 0
        self.end_offset = end_offset

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def value(self):
        tok = self.tokens[self.i]
        self.i += 1
        kind = tok.kind
        if kind == INTEGER:
            return tok.value
        if kind == IDENTIFIER:
            return VarRef(tok.value)
        if kind == ATOM:
            return Atom(tok.value)
        if kind == NIL_TOKEN:
            return NIL
        if kind == INFINITY_TOKEN:
            return Infinity()
        if kind in (TRUE, FALSE):
            return tok.value
        if kind == LBRACKET:
            return self.list_(tok)
        if kind == LBRACE:
            return self.dict_(tok)
        if kind == RBRACKET:
            raise UnbalancedBracket("']' without matching '['", tok.offset)
        if kind == RBRACE:
            raise UnbalancedBrace("'}' without matching '{'", tok.offset)
        if kind == SLASHKEY:
            raise LexError(f"key {tok.lexeme} outside a dictionary", tok.offset)
        raise LexError(f"unexpected {tok!r} in parameters", tok.offset)

    def list_(self, open_tok):
        items = []
        while True:
            tok = self.peek()
            if tok is None:
                raise UnbalancedBracket("'[' is never closed", open_tok.offset)
            if tok.kind == RBRACKET:
                self.i += 1
                return ParamList(tuple(items))
            if tok.kind == RBRACE:
                raise UnbalancedBracket("'}' closes an open '['", tok.offset)
            items.append(self.value())

    def dict_(self, open_tok):
        keyed = []
        bare = []
        seen = set()
        first_style = None
        while True:
            tok = self.peek()
            if tok is None:
                raise UnbalancedBrace("'{' is never closed", open_tok.offset)
            if tok.kind == RBRACE:
                self.i += 1
                break
            if tok.kind == RBRACKET:
                raise UnbalancedBrace("']' closes an open '{'", tok.offset)
            style = "keyed" if tok.kind == SLASHKEY else "bare"
            if first_style is None:
                first_style = style
            elif style != first_style:
                raise MixedDictStyle("keyed and positional entries in one dictionary", tok.offset)
            if style == "keyed":
                self.i += 1
                nxt = self.peek()
                if nxt is None or nxt.kind in (SLASHKEY, RBRACE):
                    raise DanglingKey(f"key {tok.lexeme} has no value", tok.offset)
                if tok.value in seen:
                    raise DuplicateKey(f"key {tok.lexeme} appears twice", tok.offset)
                seen.add(tok.value)
                keyed.append((tok.value, self.value()))
            else:
                bare.append((None, self.value()))
        if first_style == "bare":
            return ParamDict(tuple(bare), positional=True)
        return ParamDict(tuple(keyed), positional=False)

    def run(self):
        out = []
        while self.peek() is not None:
            out.append(self.value())
        return out


def parse_param_values(source) -> list:
    """Parse structured global-constraint parameters.

    ``{v1 v2}`` dictionaries come back positional (``None`` keys); see
    :func:`xcsp21.catalog.bind_conventional_order`.
    """
    tokens = _tokens(source)
    return _ValueReader(tokens, _end_offset(source, tokens)).run()
