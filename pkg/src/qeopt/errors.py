"""Exception types shared across the package.

Plain ``ValueError`` is used for invalid arguments; the classes below mark
conditions the CLI maps to distinct exit codes.
"""


class QeoptError(Exception):
    """Base class for package-specific errors."""


class CapExceededError(QeoptError):
    """A size cap protecting dense 2^n computations was exceeded."""


class InsufficientDataError(QeoptError):
    """Not enough finite data points to carry out a fit or estimate."""


class ConfigError(QeoptError):
    """Malformed or inconsistent experiment configuration."""
