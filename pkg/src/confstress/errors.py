"""Exception types shared across the toolkit."""

from __future__ import annotations


class ConfstressError(Exception):
    """Base class for all toolkit errors."""


class ParseError(ConfstressError):
    """A configuration artifact could not be parsed.

    Carries enough context (token/line and position) for the CLI to point
    at the offending input.
    """

    def __init__(self, message: str, *, token: str | None = None, position: int | None = None):
        super().__init__(message)
        self.token = token
        self.position = position


class CatalogError(ConfstressError):
    """A name or version is not in the fixed catalogs."""


class ValidationError(ConfstressError):
    """Structured input violates its schema."""

    def __init__(self, message: str, offenders: list[str] | None = None):
        super().__init__(message)
        self.offenders = offenders or []


class GraphError(ConfstressError):
    """Illegal knowledge-graph mutation or query."""


class SnapshotError(ConfstressError):
    """Malformed snapshot document."""

    def __init__(self, message: str, *, location: str | None = None):
        super().__init__(message)
        self.location = location


class PatchConflictError(ConfstressError):
    """A generated patch contradicts an already-applied one."""

    def __init__(self, message: str, conflicts: list[str] | None = None):
        super().__init__(message)
        self.conflicts = conflicts or []


class SessionError(ConfstressError):
    """Stress-test session used outside its legal state transitions."""
