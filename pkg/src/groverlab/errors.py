"""Exception types shared across the package."""

from __future__ import annotations


class GroverLabError(Exception):
    """Base class for every error raised by groverlab."""


class QasmSyntaxError(GroverLabError, SyntaxError):
    """Malformed QASM text.

    Carries the 1-based ``line`` and ``column`` of the offending token when known.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")

    def __str__(self) -> str:
        where = f" (line {self.line}, column {self.column})" if self.line is not None else ""
        return f"{self.message}{where}"


class UnknownGate(GroverLabError):
    pass


class ArityMismatch(GroverLabError):
    pass


class RecursionDetected(GroverLabError):
    pass


class UnsupportedGate(GroverLabError):
    pass


class SizeLimit(GroverLabError):
    pass


class DomainError(GroverLabError, ValueError):
    pass


class InvalidMarkedState(DomainError):
    pass


class DuplicateMarkedState(DomainError):
    pass


class DimensionMismatch(GroverLabError, ValueError):
    pass


class NotNormalized(GroverLabError, ValueError):
    pass


class OracleNotFound(GroverLabError):
    pass


class MalformedOracle(GroverLabError):
    pass
