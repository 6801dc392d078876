"""Exception hierarchy shared across the package.

Each class maps to a distinct CLI exit code (see cli.EXIT_CODES).
"""


class LwrFrontError(Exception):
    """Base class for all package errors."""


class ConfigError(LwrFrontError):
    """Invalid configuration, network, or input data."""


class DegenerateGridError(ConfigError):
    """Coincident or near-coincident special points make the grid unbuildable."""


class PruningError(ConfigError):
    """Grid pruning could not establish the guaranteed gap bounds."""


class InvariantViolationError(LwrFrontError):
    """A runtime bound (Temple increase, constraint residual, ...) failed."""


class FrontExplosionError(LwrFrontError):
    """The front count exceeded the configured cap."""


class InternalConsistencyError(LwrFrontError):
    """The implementation contradicted itself (grid closure, cascades, ...)."""
