"""Exception hierarchy.

Every error raised by the library derives from :class:`FdriskError`. The
``exit_code`` attribute feeds the CLI's exit-code contract (1 usage/config,
2 data, 3 internal).
"""


class FdriskError(Exception):
    exit_code = 3


class ConfigError(FdriskError, ValueError):
    exit_code = 1


class DataError(FdriskError, ValueError):
    exit_code = 2


class FormatError(DataError):
    """Malformed input file; ``offset`` is the byte offset where parsing failed."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class InvalidInputError(DataError):
    pass


class InvalidArgumentError(DataError):
    pass


class NotClosedError(DataError):
    pass


class DegenerateGeometryError(DataError):
    pass


class AnnotationError(DataError):
    pass


class EmptySetError(DataError):
    pass


class InsufficientScalesError(DataError):
    pass


class DegenerateFitError(DataError):
    pass


class SchemaError(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class DegenerateLabelsError(DataError):
    pass


class EncodingError(DataError):
    pass


class InfeasibleStratificationError(DataError):
    pass


class PairingError(DataError):
    pass


class PlotDataError(DataError):
    pass


class UnsupportedKindError(DataError):
    pass


class CorruptionError(DataError):
    pass


class UnsupportedVersionError(DataError):
    pass


class RangeError(DataError):
    pass


class StageError(FdriskError):
    """Failure inside a named pipeline stage; wraps the original exception."""

    def __init__(self, stage, cause):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", 3)


class ConvergenceWarning(UserWarning):
    pass
