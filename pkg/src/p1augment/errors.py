"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, NumericalError
(and subclasses) -> 3, DataError -> 4.
"""


class ConfigError(Exception):
    """Invalid or unknown configuration key/value."""


class NumericalError(Exception):
    """A numerical routine failed to produce a trustworthy result."""


class ConvergenceError(NumericalError):
    """An iterative solver hit its iteration cap without converging."""


class TrackingError(NumericalError):
    """Eigenstate continuation could not resolve labels at some field."""

    def __init__(self, message, field_gauss=None):
        super().__init__(message)
        self.field_gauss = field_gauss


class DataError(Exception):
    """Malformed or missing input data (files, trace columns, anchors)."""
