"""Exception types shared across chainscope."""


class ChainscopeError(Exception):
    """Base class for all chainscope errors."""


class DomainError(ChainscopeError, ValueError):
    """A state lies outside the domain of a map."""


class ConfigError(ChainscopeError, ValueError):
    """Invalid user-supplied configuration or argument."""


class PreconditionError(ChainscopeError, ValueError):
    """An operation was called outside its precondition.

    ``min_eps`` carries the smallest threshold that would satisfy the
    precondition, when one exists.
    """

    def __init__(self, message, *, vertices=(), min_eps=None):
        super().__init__(message)
        self.vertices = tuple(vertices)
        self.min_eps = min_eps


class RefinementError(ChainscopeError):
    """A chain segment could not be refined at the requested threshold."""

    def __init__(self, message, *, position, source, target):
        super().__init__(message)
        self.position = position
        self.source = source
        self.target = target
