"""Exception hierarchy.

ValidationError covers bad inputs and configuration (CLI exit code 1);
NumericError covers runtime/numeric failures (exit code 2).
"""


class CorrStatesError(Exception):
    pass


class ValidationError(CorrStatesError):
    pass


class IngestionError(ValidationError):
    """Malformed or incomplete input panel; message names the offending cell."""


class DegenerateSeriesError(CorrStatesError):
    """A series with zero variance where a correlation requires spread."""


class NumericError(CorrStatesError):
    pass
