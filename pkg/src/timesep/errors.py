"""Exception hierarchy.

Three failure families, mirrored by the CLI exit codes: configuration
problems (exit 2), data problems (exit 3), and numerical failures (exit 4).
"""

from __future__ import annotations


class TimesepError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(TimesepError):
    """Invalid or inconsistent configuration."""

    exit_code = 2


class DataError(TimesepError):
    """Input data violates a contract."""

    exit_code = 3


class NumericalError(TimesepError):
    """A numerical procedure failed."""

    exit_code = 4


# --- data errors -----------------------------------------------------------

class NonMonotonicTime(DataError):
    pass


class NonFiniteValue(DataError):
    def __init__(self, row: int, col: int):
        self.row = row
        self.col = col
        super().__init__(f"non-finite value at row {row}, column {col}")


class EmptyPanel(DataError):
    pass


class InsufficientData(DataError):
    pass


class ShapeMismatch(DataError):
    pass


class ZeroWeight(DataError):
    pass


class NonPositivePrice(DataError):
    def __init__(self, row: int, col: int):
        self.row = row
        self.col = col
        super().__init__(f"non-positive price at row {row}, column {col}")


class ParseError(DataError):
    def __init__(self, line: int, message: str = ""):
        self.line = line
        super().__init__(f"line {line}: {message}" if message else f"parse error at line {line}")


class UnparseableDate(DataError):
    def __init__(self, line: int, text: str = ""):
        self.line = line
        super().__init__(f"line {line}: cannot parse date {text!r}")


class MissingColumn(DataError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"column {name!r} not found")


class GapTooLarge(DataError):
    def __init__(self, line: int, col: str):
        self.line = line
        self.col = col
        super().__init__(f"line {line}: gap in column {col!r} exceeds max_gap")


class EmptyIntersection(DataError):
    pass


# --- config errors ---------------------------------------------------------

class BadSpec(ConfigError):
    pass


class WindowOutOfRange(ConfigError):
    pass


class TooManyComponents(ConfigError):
    pass


# --- numerical errors ------------------------------------------------------

class SingularCovariance(NumericalError):
    pass


class NotPositiveDefinite(NumericalError):
    pass


class EigenNoConvergence(NumericalError):
    def __init__(self, iterations: int, message: str = ""):
        self.iterations = iterations
        super().__init__(message or f"eigensolver did not converge ({iterations} iterations)")


class NoConvergence(NumericalError):
    def __init__(self, component: int | None, iterations: int):
        self.component = component
        self.iterations = iterations
        where = "parallel sweep" if component is None else f"component {component}"
        super().__init__(f"fixed-point iteration did not converge for {where} "
                         f"after {iterations} iterations (restarts exhausted)")


class DegenerateUpdate(NumericalError):
    pass
