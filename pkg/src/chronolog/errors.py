"""Exception hierarchy shared across the engine.

The CLI maps these onto exit codes: input problems exit with 2,
exceeded resource caps with 3.
"""

from __future__ import annotations


class ChronologError(Exception):
    """Base class for all errors raised by this package."""


class InputError(ChronologError):
    """The supplied program, database, or query is invalid."""


class ParseError(InputError):
    """Syntax error with source location."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class NotForwardPropagating(InputError):
    """The operation only supports Horn, boxminus, and diamondminus rules."""


class CapExceeded(ChronologError):
    """A configurable resource cap was hit before the computation finished."""


class CycleCapExceeded(CapExceeded):
    """Simple-cycle enumeration produced more cycles than allowed."""


class WindowCapExceeded(CapExceeded):
    """The pattern-detection loop did not converge within the window cap."""


class StepCapExceeded(CapExceeded):
    """The fixpoint evaluation exceeded its step cap (diagnostic guard)."""
