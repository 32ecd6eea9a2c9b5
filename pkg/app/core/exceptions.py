"""
Exception types shared by the computational modules and the CLI.
"""
from typing import Any, Dict, Optional


class SecantToolkitError(Exception):
    """Base class for toolkit errors."""


class InputValidationError(SecantToolkitError, ValueError):
    """Malformed input to an operation (shape, degree, subset, determinant...)."""


class SchemaError(InputValidationError):
    """A JSON document does not match its schema."""

    def __init__(self, message: str, path: str = "", line: Optional[int] = None):
        self.path = path
        self.line = line
        location = path or "<root>"
        if line is not None:
            location = f"{location} (line {line})"
        super().__init__(f"{location}: {message}")


class BasisSearchError(SecantToolkitError):
    """Random candidates could not complete an independent basis."""


class ModularRankMismatch(SecantToolkitError):
    """Ranks computed modulo different primes disagree."""

    def __init__(self, ranks: Dict[int, int]):
        self.ranks = ranks
        super().__init__(f"modular ranks disagree: {ranks}")


class VerificationFailed(SecantToolkitError):
    """A verification check failed; the partial report carries the witness."""

    def __init__(self, check: str, report: Dict[str, Any]):
        self.check = check
        self.report = report
        super().__init__(f"check {check!r} failed")


class EvaluationBudgetExceeded(SecantToolkitError):
    """A timed evaluation ran past its budget."""
