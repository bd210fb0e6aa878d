"""Exception hierarchy shared by all modules."""

from __future__ import annotations

from dataclasses import dataclass


class ZenError(Exception):
    """Base class for every error raised by this package."""


@dataclass(frozen=True)
class Violation:
    code: str
    subject: str
    detail: str = ""

    def __str__(self) -> str:
        text = f"{self.code}({self.subject})"
        return f"{text}: {self.detail}" if self.detail else text


class ValidationError(ZenError, ValueError):
    """Raised with the full list of violations found while validating a spec."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))

    @property
    def codes(self) -> set[str]:
        return {v.code for v in self.violations}


# --- time series ingestion -------------------------------------------------

class HorizonMismatch(ZenError, ValueError):
    def __init__(self, n_rows: int, expected: int = 8760, subject: str = ""):
        self.n_rows = n_rows
        self.expected = expected
        where = f" in {subject}" if subject else ""
        super().__init__(f"expected {expected} hourly rows{where}, got {n_rows}")


class UnparseableValue(ZenError, ValueError):
    def __init__(self, row: int, col: str, raw: str):
        self.row, self.col, self.raw = row, col, raw
        super().__init__(f"row {row}, column {col!r}: cannot parse {raw!r} as a decimal-point real")


class MissingColumn(ZenError, KeyError):
    def __init__(self, series_id: str, column: str | None = None):
        self.series_id = series_id
        self.column = column or series_id
        super().__init__(f"column {self.column!r} for series {series_id!r} not found")

    def __str__(self) -> str:
        return self.args[0]


class NegativeLoad(ZenError, ValueError):
    def __init__(self, series_id: str, row: int, value: float):
        self.series_id, self.row, self.value = series_id, row, value
        super().__init__(f"series {series_id!r} has negative value {value} at row {row}")


class UnitMismatch(ZenError, ValueError):
    pass


# --- tariffs / model -------------------------------------------------------

class NegativeSubscription(ZenError, ValueError):
    pass


class MissingVariable(ZenError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "missing variable"


# --- solve -----------------------------------------------------------------

class EmptyModel(ZenError, ValueError):
    pass


class BackendUnavailable(ZenError, RuntimeError):
    pass


class ParseError(ZenError, ValueError):
    def __init__(self, path, line: int, column: int, message: str):
        self.path, self.line, self.column = path, line, column
        super().__init__(f"{path}:{line}:{column}: {message}")


class SolutionOverflow(ParseError):
    """A numeric token in a solution file does not fit a finite double."""


class SolveFailed(ZenError, RuntimeError):
    def __init__(self, status: str, message: str = ""):
        self.status = status
        super().__init__(message or f"solve ended with status {status!r}")


class Infeasible(SolveFailed):
    def __init__(self, message: str = ""):
        super().__init__("infeasible", message)


class Unbounded(SolveFailed):
    def __init__(self, message: str = ""):
        super().__init__("unbounded", message)


class TimeLimit(SolveFailed):
    def __init__(self, message: str = ""):
        super().__init__("limit", message)


# --- analysis / cli --------------------------------------------------------

class MismatchedScenarios(ZenError, ValueError):
    pass


class ConfigError(ZenError, ValueError):
    """Scenario document does not match the schema; ``pointer`` is a JSON pointer."""

    def __init__(self, pointer: str, message: str):
        self.pointer = pointer
        super().__init__(f"{pointer or '/'}: {message}")
