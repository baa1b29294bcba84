"""Exception hierarchy for weyldisc.

Every error a caller is expected to handle maps to one of these; the CLI
translates them into distinct exit codes (see cli.py).
"""

from __future__ import annotations


class WeyldiscError(Exception):
    """Base class for all weyldisc errors."""


class ExprSyntaxError(WeyldiscError):
    """Coefficient expression could not be parsed.

    Carries the byte offset of the offending token in ``offset``.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class EvaluationError(WeyldiscError):
    """Coefficient expression could not be evaluated to a finite real value."""


class CoefficientRangeError(WeyldiscError):
    """A table-backed coefficient was evaluated outside its declared range."""


class WindowError(WeyldiscError):
    """A trajectory or sequence was accessed outside its stored window."""


class InadmissibleLambdaError(WeyldiscError):
    """The spectral parameter hits (or is too close to) an excluded value,
    or is real where a nonreal value is required."""

    def __init__(self, message: str, t: int | None = None):
        super().__init__(message)
        self.t = t


class PrecisionExhaustedError(WeyldiscError):
    """A magnitude left the representable range of the active precision mode."""


class NativeOverflowError(PrecisionExhaustedError, EvaluationError):
    """Native-float overflow: an evaluation error that also exhausts the
    precision mode (callers may catch either)."""


class MatchingSingularError(WeyldiscError):
    """A constant-matching linear system was singular; result would be
    meaningless and is refused rather than guessed."""


class NumericalInvariantError(WeyldiscError):
    """An identity that must hold to working tolerance failed; indicates
    precision exhaustion or an internal inconsistency."""


class ScenarioError(WeyldiscError):
    """A scenario file or built-in request failed to load or validate."""
