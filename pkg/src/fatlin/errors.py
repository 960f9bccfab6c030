"""Exception types shared across the package.

The CLI maps these onto process exit codes: PreconditionError -> 2,
EnumerationCapError -> 3, TheoremCheckError -> 1.
"""


class FatlinError(Exception):
    """Base class for all package-specific errors."""


class PreconditionError(FatlinError, ValueError):
    """An operation was called with arguments violating its contract."""


class EnumerationCapError(FatlinError, RuntimeError):
    """An exhaustive enumeration would exceed the configured vector cap."""


class ConsistencyError(FatlinError, RuntimeError):
    """An internal cross-check failed; indicates a bug, not bad input."""


class TheoremCheckError(FatlinError, RuntimeError):
    """A predicted classification disagrees with an enumerated one."""
