"""Exception hierarchy shared by the library and the CLI.

The CLI maps these onto process exit codes: configuration problems exit
with 1, data problems with 2, numerical failures with 3.
"""


class MisinfoSimError(Exception):
    exit_code = 1


class ConfigError(MisinfoSimError):
    """Invalid configuration value or malformed config file."""

    exit_code = 1


class DataError(MisinfoSimError):
    """Malformed or unusable input data."""

    exit_code = 2


class ParseError(DataError):
    """Malformed line in a dataset file; message names the line."""


class EmptyDatasetError(DataError):
    """An operation produced or received a dataset with no usable content."""


class UndefinedMetricError(DataError):
    """A metric has no defined value on this input (e.g. no labeled items)."""


class NumericalError(MisinfoSimError):
    """A solver produced a non-finite or singular intermediate."""

    exit_code = 3
