"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration problems exit 2, data and
format problems exit 3, numeric failures exit 4.
"""


class RPUrnError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(RPUrnError):
    """Invalid configuration or incompatible options."""


class DataFormatError(RPUrnError):
    """Malformed or unreadable input data."""


class NumericError(RPUrnError):
    """A computation hit a degenerate or non-finite regime."""
