"""Exception types shared across the package."""


class NoDataError(RuntimeError):
    """An estimate was requested but the data contain no qualifying events.

    Raised instead of returning NaN so callers (and the CLI) can report an
    actionable message.
    """


class DegenerateBootstrapError(RuntimeError):
    """More than half of the bootstrap replicates had to be discarded."""


class FactorizationError(ArithmeticError):
    """A covariance matrix could not be factorized even after jittering."""

    def __init__(self, message: str, dimension: int | None = None):
        super().__init__(message)
        self.dimension = dimension


class CsvFormatError(ValueError):
    """Malformed CSV input; carries the 1-based file row number."""

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message)
        self.row = row
