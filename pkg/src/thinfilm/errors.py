"""Exception hierarchy shared by every module of the package."""


class ThinFilmError(Exception):
    """Base class for all package errors."""


class InvalidDimension(ThinFilmError, ValueError):
    pass


class EmptyBox(ThinFilmError, ValueError):
    pass


class NonpositiveThickness(ThinFilmError, ValueError):
    pass


class NonpositiveEps(ThinFilmError, ValueError):
    pass


class InvalidS(ThinFilmError, ValueError):
    pass


class InvalidSigma(ThinFilmError, ValueError):
    pass


class InvalidPath(ThinFilmError, ValueError):
    pass


class PathTooShort(ThinFilmError, ValueError):
    pass


class PathViolatesThickness(ThinFilmError, ValueError):
    pass


class ParseError(ThinFilmError, ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class UnknownVariable(ParseError):
    pass


class GradientUnavailable(ThinFilmError):
    pass


class NotHorizontal(ThinFilmError, ValueError):
    pass


class DegenerateSampling(ThinFilmError):
    pass


class NonFiniteSample(ThinFilmError, FloatingPointError):
    pass


class BudgetExceeded(ThinFilmError):
    pass


class EmptyInterior(ThinFilmError):
    pass


class OutsideInterior(ThinFilmError, ValueError):
    pass


class RegionNotInterior(ThinFilmError, ValueError):
    pass


class TooFewPoints(ThinFilmError, ValueError):
    pass


class NonPositiveValues(ThinFilmError, ValueError):
    pass


class SchemaVersionMismatch(ThinFilmError):
    pass


class ConfigError(ThinFilmError, ValueError):
    pass


class PartialResults(ThinFilmError):
    """A sweep failed part-way; ``records`` holds everything that completed."""

    def __init__(self, records, failed_eps: float, cause: BaseException):
        super().__init__(f"sweep stopped at eps={failed_eps}: {cause}")
        self.records = list(records)
        self.failed_eps = failed_eps
        self.cause = cause
