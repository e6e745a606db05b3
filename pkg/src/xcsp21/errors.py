"""Exception hierarchy shared by every module of the package.

Each exception class carries a ``code`` equal to its class name; the
document loader and the validators reuse those codes for diagnostics.
"""

from __future__ import annotations


class XCSPError(Exception):
    """Base class for all errors raised by :mod:`xcsp21`."""

    @property
    def code(self) -> str:
        return type(self).__name__


class UnknownName(XCSPError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


# -- fragment (abridged / tagged body) errors -------------------------------

class FragmentError(XCSPError):
    """An error located inside a body fragment.

    ``offset`` is the position of the offending character inside the text
    given to the parser (or, for documents, a byte offset in the file).
    """

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.message = message
        self.offset = offset

    def __str__(self):
        if self.offset is None:
            return self.message
        return f"{self.message} (at offset {self.offset})"


class LexError(FragmentError):
    pass


class EmptyDomain(FragmentError):
    pass


class InvertedInterval(FragmentError):
    pass


class ArityMismatch(FragmentError):
    def __init__(self, message: str, offset: int | None = None, group_index: int | None = None):
        super().__init__(message, offset)
        self.group_index = group_index


class MissingFirstCost(FragmentError):
    pass


class NegativeCost(FragmentError):
    pass


class UnknownType(FragmentError):
    pass


class DuplicateParameter(FragmentError):
    pass


class UnbalancedBrace(FragmentError):
    pass


class UnbalancedBracket(FragmentError):
    pass


class MixedDictStyle(FragmentError):
    pass


class DanglingKey(FragmentError):
    pass


class DuplicateKey(FragmentError):
    pass


# -- expression language ----------------------------------------------------

class ExprError(XCSPError):
    pass


class ExprSyntaxError(ExprError, FragmentError):
    pass


class WrongArity(ExprError, FragmentError):
    pass


class TypeMismatch(ExprError, FragmentError):
    pass


class ReservedName(ExprError, FragmentError):
    pass


class UnboundParameter(ExprError):
    def __init__(self, name: str):
        super().__init__(f"parameter {name!r} is not declared")
        self.name = name


class UnusedParameter(ExprError):
    def __init__(self, name: str):
        super().__init__(f"formal parameter {name!r} never occurs in the expression")
        self.name = name


class EvaluationError(ExprError):
    pass


class DivisionByZero(EvaluationError):
    pass


class NegativeExponent(EvaluationError):
    pass


class ArithmeticOverflow(EvaluationError):
    pass


# -- semantics --------------------------------------------------------------

class SemanticsError(XCSPError):
    pass


class UnboundVariable(SemanticsError):
    pass


class DomainViolation(SemanticsError):
    pass


class PartialAssignment(SemanticsError):
    pass


class UnsupportedGlobal(SemanticsError):
    pass


class MalformedParams(SemanticsError):
    pass


class InconsistentTask(MalformedParams):
    pass


class NegativeFunctionCost(SemanticsError):
    pass


class OpenInstance(SemanticsError):
    pass


class NotApplicable(SemanticsError):
    """The requested operation does not apply to this kind of instance."""


class BudgetExceeded(SemanticsError):
    """The node budget ran out before the search finished.

    ``nodes`` is the number of nodes explored and ``progress`` holds
    whatever partial result the search had accumulated (solutions found so
    far, current count, or current best cost).
    """

    def __init__(self, nodes: int, progress=None):
        super().__init__(f"node budget exhausted after {nodes} nodes")
        self.nodes = nodes
        self.progress = progress


# -- documents --------------------------------------------------------------

class LoadError(XCSPError):
    """Loading a document failed; ``diagnostics`` lists every finding."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        errors = [d for d in self.diagnostics if d.severity == "error"]
        first = errors[0] if errors else None
        msg = f"{len(errors)} error(s)"
        if first is not None:
            msg += f"; first: [{first.code}] {first.path}: {first.message}"
        super().__init__(msg)


class XmlError(LoadError):
    pass
