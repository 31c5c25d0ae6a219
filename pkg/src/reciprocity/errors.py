"""Exception hierarchy shared by all modules (and mapped to CLI exit codes)."""

from __future__ import annotations

from typing import Any


class PreconditionError(ValueError):
    """Input outside an operation's domain (wrong residue class, square D, ...)."""


class InvariantViolation(RuntimeError):
    """A computed object contradicts a proven statement.

    Raising this means either a bug or a counterexample to a theorem, so the
    offending data is kept in ``context`` for the error record.
    """

    def __init__(self, message: str, **context: Any) -> None:
        super().__init__(message)
        self.context = context


class SearchExhausted(RuntimeError):
    """A bounded search hit its ceiling. Says nothing about nonexistence."""

    def __init__(self, message: str, ceiling: int) -> None:
        super().__init__(message)
        self.ceiling = ceiling
