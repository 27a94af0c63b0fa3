"""Error taxonomy shared by the library and the CLI.

The CLI maps these onto its exit codes: UsageError -> 1, DataError -> 2,
NumericError -> 3.
"""


class UsageError(Exception):
    """Bad command line or option combination."""


class DataError(Exception):
    """Malformed or inconsistent input data (files, manifests, configs, shapes)."""


class NumericError(Exception):
    """Numeric failure: count overflow, NaN loss, undefined metric."""


class UndefinedMetricError(NumericError):
    """A metric denominator is zero; the value is undefined, not 0 or NaN."""
