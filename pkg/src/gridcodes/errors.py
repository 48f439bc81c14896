"""Exception hierarchy shared by every module.

Each error class maps to one distinct CLI exit code (see ``cli.EXIT_CODES``),
so callers can branch on failure class without parsing messages.
"""

from __future__ import annotations


class GridCodesError(Exception):
    """Base class for all toolkit errors."""


class NotFoundError(GridCodesError):
    """A referenced node, candidate, target, or label does not exist."""


class ParseError(GridCodesError):
    """Input text does not conform to the documented grammar."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            loc = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{loc}: {message}"
        super().__init__(message)


class SchemaError(GridCodesError):
    """Input parsed but violates a structural rule (duplicate ids, dangling references)."""


class ConfigError(GridCodesError):
    """Invalid option or parameter combination."""


class InfeasibleError(GridCodesError):
    """No selection of candidates can satisfy the instance.

    Carries the feasibility report naming unobservable targets and twin pairs.
    """

    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


class TooLargeError(GridCodesError):
    """Instance exceeds the brute-force candidate cap."""


class NotACodeError(GridCodesError):
    """A candidate selection failed verification and cannot be labeled."""

    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


class DegenerateSignalError(GridCodesError):
    """A signal window has zero variance; its SNR is undefined."""


class DomainError(GridCodesError):
    """A numeric value lies outside the function's domain (e.g. non-positive mean)."""
