"""Exception types shared across the package."""

from __future__ import annotations


class GraphError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(GraphError):
    """Input failed a precondition (empty name, bad threshold, malformed vote)."""


class NotFoundError(GraphError):
    """A referenced entity, edge, document or case does not exist."""


class IntegrityError(GraphError):
    """An operation would leave dangling references in the graph."""


class LoadError(GraphError):
    """A persisted file could not be parsed.

    ``line_number`` is 1-based and points at the offending JSONL line when
    known, otherwise it is ``None``.
    """

    def __init__(self, message: str, line_number: int | None = None) -> None:
        super().__init__(message)
        self.line_number = line_number


class PoolExhaustedError(GraphError):
    """A pseudonym pool ran out of unused names for one entity type."""

    def __init__(self, entity_type: str, pool_size: int) -> None:
        super().__init__(
            f"pseudonym pool for entity type {entity_type!r} exhausted "
            f"({pool_size} names available)"
        )
        self.entity_type = entity_type
