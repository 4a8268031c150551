class PopZetaError(Exception):
    """Base class for errors raised by this package."""


class DomainError(PopZetaError, ValueError):
    """An argument lies outside the domain of the operation."""


class OutOfRangeError(DomainError):
    """A query exceeds the bound a table was built for."""


class ResourceError(PopZetaError, MemoryError):
    """The request does not fit the memory budget."""


class PreconditionError(PopZetaError, ValueError):
    """Inputs violate a documented precondition."""


class ConsistencyError(PopZetaError, AssertionError):
    """An internal invariant failed; indicates a bug, never bad input."""


class BranchError(PopZetaError, ArithmeticError):
    """Branch tracking lost continuity along a path (path too coarse or singular)."""


class QuadratureError(PopZetaError, ArithmeticError):
    """Numerical integration failed to reach the requested tolerance."""
