"""Exception hierarchy.

Every error carries the process exit code the CLI maps it to:
2 for bad parameters, 3 for bad input data, 4 for numerically degenerate
situations.
"""


class RegionClustError(Exception):
    exit_code = 1


class ParameterError(RegionClustError, ValueError):
    """An argument is outside its documented range."""

    exit_code = 2


class DataError(RegionClustError, ValueError):
    exit_code = 3


class SchemaError(DataError):
    """CSV header does not match the expected column set."""


class RowError(DataError):
    """A single field failed validation; carries the 1-based file row."""

    def __init__(self, message: str, row: int, field: str):
        super().__init__(f"{message} at row {row}")
        self.row = row
        self.field = field


class DuplicateIdError(DataError):
    pass


class InsufficientDataError(DataError):
    pass


class GenerationError(DataError):
    """Synthetic noise pushed a value too far outside its valid domain."""


class DegenerateError(RegionClustError, ArithmeticError):
    exit_code = 4


class DimensionError(ParameterError):
    pass
