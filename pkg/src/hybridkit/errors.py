"""Shared exception types."""


class HybridKitError(Exception):
    """Base class for all errors raised by this package."""


class InvalidStructureError(HybridKitError, ValueError):
    """A structure or its JSON encoding violates a type invariant.

    The message starts with the path of the first violation,
    e.g. ``relations.E[0][1]: 'z' is not in the universe``.
    """


class ParseError(HybridKitError, ValueError):
    """A formula failed to parse; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"at position {position}: {message}")
        self.position = position


class ScopeError(HybridKitError, ValueError):
    """A closed formula uses an unbound world variable or bad nominal index."""


class ResourceLimitError(HybridKitError, RuntimeError):
    """A configurable size guard was exceeded; the result was not computed."""
