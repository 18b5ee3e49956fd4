"""Exception types shared across the package."""

from __future__ import annotations


class FimeqError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(FimeqError, ValueError):
    """A value fails a documented domain restriction."""


class PreconditionError(FimeqError, ValueError):
    """An operation was called on input outside its stated contract."""


class BudgetExceeded(FimeqError):
    """A solver ran out of its search budget before reaching a verdict."""


class ParseError(FimeqError, ValueError):
    """A text or JSON input could not be parsed; carries a location."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + where)
