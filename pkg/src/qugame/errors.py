"""Error types shared across the package.

The CLI maps these onto process exit codes: DomainError -> 2,
ResourceError -> 3.
"""


class QugameError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(QugameError, ValueError):
    """Invalid argument or precondition violation (bad digit, dims mismatch...)."""


class ResourceError(QugameError, RuntimeError):
    """A configured size cap was exceeded (state dimension, operator dimension)."""
