"""A small mixed-content XML tree built on expat.

Every element remembers the byte offset of its start tag and a readable
path such as ``/instance/relations/relation[2]``.  Text runs are
:class:`Text` strings that carry their own byte offset, which lets the
body parsers report absolute positions.  Document type declarations and
entity declarations are refused outright.
"""

from __future__ import annotations

from xml.parsers import expat

from .diagnostics import Diagnostic
from .errors import XmlError


class Text(str):
    """A text run with the byte offset where it starts."""

    offset: int

    def __new__(cls, value: str, offset: int):
        obj = super().__new__(cls, value)
        obj.offset = offset
        return obj


class Element:
    __slots__ = ("tag", "attrib", "children", "offset", "path", "raw", "parent")

    def __init__(self, tag: str, attrib: dict, offset: int, parent=None):
        self.tag = tag
        self.attrib = attrib
        self.children: list = []
        self.offset = offset
        self.path = ""
        self.raw = None  # source slice, kept for <extension> elements only
        self.parent = parent

    def elements(self, tag: str | None = None):
        return [c for c in self.children if isinstance(c, Element) and (tag is None or c.tag == tag)]

    def find(self, tag: str):
        for c in self.children:
            if isinstance(c, Element) and c.tag == tag:
                return c
        return None

    @property
    def text(self) -> str:
        return "".join(c for c in self.children if isinstance(c, str))

    def __repr__(self):
        return f"<Element {self.tag} at {self.offset}>"


class _Refused(Exception):
    pass


def _fail(message: str, offset: int, path: str = "/"):
    raise XmlError([Diagnostic("error", "XmlError", path, offset, message)])


def parse(data) -> Element:
    """Parse ``data`` (bytes or str) and return the root element."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    parser = expat.ParserCreate()
    parser.SetParamEntityParsing(expat.XML_PARAM_ENTITY_PARSING_NEVER)
    stack: list[Element] = []
    root: list[Element] = []
    pending: list = []  # [offset, chunks]

    def flush():
        if pending and stack:
            offset, chunks = pending
            stack[-1].children.append(Text("".join(chunks), offset))
        pending.clear()

    def start(tag, attrib):
        flush()
        parent = stack[-1] if stack else None
        el = Element(tag, attrib, parser.CurrentByteIndex, parent)
        if parent is not None:
            parent.children.append(el)
        else:
            root.append(el)
        stack.append(el)

    def end(tag):
        flush()
        el = stack.pop()
        if el.tag == "extension":
            at = parser.CurrentByteIndex
            if data.startswith(b"</", at):
                stop = data.index(b">", at) + 1
            else:
                stop = data.index(b">", el.offset) + 1
            el.raw = data[el.offset:stop].decode("utf-8")

    def chars(text):
        if not stack:
            return
        if not pending:
            pending.extend([parser.CurrentByteIndex, []])
        pending[1].append(text)

    def refuse_doctype(*args):
        raise _Refused("document type declarations are not accepted")

    def refuse_entity(*args):
        raise _Refused("entity declarations are not accepted")

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    parser.StartDoctypeDeclHandler = refuse_doctype
    parser.EntityDeclHandler = refuse_entity
    parser.ExternalEntityRefHandler = lambda *a: 0

    try:
        parser.Parse(data, True)
    except _Refused as exc:
        _fail(str(exc), max(parser.CurrentByteIndex, 0))
    except expat.ExpatError as exc:
        _fail(f"malformed XML: {expat.ErrorString(exc.code)} (line {exc.lineno}, column {exc.offset})",
              _byte_offset(data, exc.lineno, exc.offset))
    if not root:
        _fail("document has no root element", 0)
    _assign_paths(root[0], "")
    return root[0]


def _byte_offset(data: bytes, line: int, column: int) -> int:
    start = 0
    for _ in range(line - 1):
        nl = data.find(b"\n", start)
        if nl < 0:
            break
        start = nl + 1
    return min(start + column, max(len(data) - 1, 0))


def _assign_paths(el: Element, path: str) -> None:
    el.path = path or f"/{el.tag}"
    kids = el.elements()
    counts: dict = {}
    for child in kids:
        counts[child.tag] = counts.get(child.tag, 0) + 1
    seen: dict = {}
    for child in kids:
        label = child.tag
        if counts[child.tag] > 1:
            seen[child.tag] = seen.get(child.tag, 0) + 1
            label = f"{child.tag}[{seen[child.tag]}]"
        _assign_paths(child, f"{el.path}/{label}")
