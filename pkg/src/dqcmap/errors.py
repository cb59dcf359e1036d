"""Exception types shared across the package.

The CLI maps these onto exit codes: InputError and subclasses mean the user
handed us something malformed (exit 2), InfeasibleError means the instance
cannot be satisfied (exit 3), anything else is an internal failure (exit 4).
"""
from __future__ import annotations


class InputError(Exception):
    """Malformed user input (files, flags, config values)."""


class QasmError(InputError):
    """OpenQASM parse failure, carries the 1-based source line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(InputError):
    """Cluster config or report input failed validation."""


class InfeasibleError(Exception):
    """The instance admits no capacity-feasible solution."""
