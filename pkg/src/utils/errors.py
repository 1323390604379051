"""
Exception hierarchy shared by every package.

Checkers report failed hypotheses as verdicts; these exceptions are raised only
when an operation cannot proceed.
"""

from typing import Optional


class HammersteinError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 3
    status = "error"

    def __init__(self, message: str, label: Optional[str] = None):
        super().__init__(message)
        self.label = label

    def machine_line(self) -> str:
        """One-line, machine-parseable description used by the CLI."""
        reason = str(self).replace("\n", " ")
        return f"status={self.status} code={self.exit_code} label={self.label or '-'} reason={reason}"


class MalformedInputError(HammersteinError, ValueError):
    """Input data violates a structural requirement."""

    exit_code = 3
    status = "malformed_input"


class HypothesisError(HammersteinError):
    """A theorem hypothesis required by the requested operation does not hold."""

    exit_code = 1
    status = "hypothesis_failure"

    def __init__(self, message: str, labels: tuple[str, ...] = ()):
        super().__init__(message, label=",".join(labels) if labels else None)
        self.labels = tuple(labels)


class ConvergenceError(HammersteinError):
    """An iteration degenerated or left its admissible ball."""

    exit_code = 2
    status = "non_convergence"
