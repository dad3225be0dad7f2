"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: config errors exit 2, data
errors exit 3, numerical divergence exits 4.
"""


class SubanomError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(SubanomError):
    """Invalid or inconsistent configuration."""


class CapacityError(ConfigError):
    """An injection request asks for more nodes than the graph has."""


class DataError(SubanomError):
    """Malformed or out-of-range input data (files, ids, shapes)."""


class UndefinedMetricError(DataError):
    """A metric was requested on labels that make it undefined."""


class DivergenceError(SubanomError):
    """Training produced a non-finite loss."""
