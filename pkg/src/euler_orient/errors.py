"""Exception types shared across the package.

The CLI maps these onto its exit codes: input problems exit 1,
lemma violations exit 2, resource caps exit 3.
"""

from __future__ import annotations


class EdgeListError(ValueError):
    """Malformed edge-list text. ``line`` is 1-based, or 0 for whole-file problems."""

    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class CapExceeded(RuntimeError):
    """A configured resource cap (edges, frontier width, rejection attempts) was hit."""


class HypothesisError(ValueError):
    """The input graph does not satisfy the preconditions of the requested operation."""


class ConvergenceError(RuntimeError):
    pass


class VerificationError(AssertionError):
    """Raised when a lemma check finds a violation on a hypothesis-satisfying instance."""

    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)
