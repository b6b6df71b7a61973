"""
Exception hierarchy shared by every stage of the pipeline.
Each error class carries the exit code main.py returns for it.
"""


class CodaError(Exception):
    """Base class for all errors raised by the analysis pipeline."""

    exit_code = 2


class UsageError(CodaError):
    """Invalid settings: bad ranges, missing seed, unknown keys."""

    exit_code = 1


class InvalidClusterCountError(UsageError, ValueError):
    """Cluster count outside the range the data supports."""


class DataError(CodaError, ValueError):
    """Input data violates the schema or a domain rule."""

    exit_code = 2


class InvalidCompositionError(DataError):
    """A composition has a non-positive or non-finite part, or fewer than two parts."""


class DimensionMismatchError(DataError):
    """Two compositions (or a composition and a matrix) disagree on D."""


class NegativePartError(DataError):
    """An accounting part is negative."""


class UnimputablePartError(DataError):
    """A part with zeros has no non-zero value to derive a detection limit from."""


class EmptyInputError(DataError):
    """An operation received an empty collection."""


class NumericalError(CodaError, ArithmeticError):
    """A numerical procedure could not produce a usable result."""

    exit_code = 3


class StageError(CodaError):
    """Wraps an error raised inside a named pipeline stage."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", NumericalError.exit_code)
        super().__init__(f"stage '{stage}' failed: {cause}")
