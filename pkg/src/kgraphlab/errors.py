"""Exception hierarchy shared by every module.

Each error carries a machine-readable ``kind`` (the class name), an optional
source location and an optional witness, so the CLI can report failures as JSON.
"""

from __future__ import annotations

from typing import Any


class KGraphError(Exception):
    def __init__(self, message: str, *, line: int | None = None,
                 column: int | None = None, witness: Any = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column
        self.witness = witness

    @property
    def kind(self) -> str:
        return type(self).__name__

    def __str__(self) -> str:
        loc = ""
        if self.line is not None:
            loc = f"line {self.line}"
            if self.column is not None:
                loc += f", column {self.column}"
            loc += ": "
        return f"{self.kind}: {loc}{self.message}"

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"error": self.kind, "message": self.message}
        if self.line is not None:
            out["line"] = self.line
        if self.column is not None:
            out["column"] = self.column
        if self.witness is not None:
            out["witness"] = self.witness
        return out


# graph description and validation
class ParseError(KGraphError): pass
class DuplicateId(ParseError): pass
class InvalidSkeleton(KGraphError): pass
class InvalidSquare(KGraphError): pass
class EmptyGraph(KGraphError): pass
class MissingSquare(KGraphError): pass
class NonBijectiveSquare(KGraphError): pass
class EndpointMismatch(KGraphError): pass
class CubeInconsistency(KGraphError): pass

# path algebra
class NotComposable(KGraphError): pass
class DegreeOutOfRange(KGraphError): pass
class UnknownPath(KGraphError): pass
class RangeMismatch(KGraphError): pass
class MixedRange(KGraphError): pass
class VertexMember(KGraphError): pass
class SetTooLarge(KGraphError): pass

# satiation
class BudgetExceeded(KGraphError): pass

# cocycles
class WrongGraphShape(KGraphError): pass
class InvalidCocycle(KGraphError): pass
class NotASubgraph(KGraphError): pass

# operators
class BoundTooSmall(KGraphError): pass
class NoScalarRelation(KGraphError): pass
class NotDSCompatible(KGraphError): pass

# ideals
class NotHereditary(KGraphError): pass
class NotSaturated(KGraphError): pass
class EmptyQuotient(KGraphError): pass

# cli
class UnknownCommand(KGraphError): pass
