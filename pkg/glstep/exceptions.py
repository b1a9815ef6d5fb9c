"""
Exception hierarchy for glstep
"""
from typing import Any, Optional


class GLStepError(Exception):
    """Base class for every error raised by glstep"""


class InputError(GLStepError, ValueError):
    """Malformed numerical input (NaN/Inf entries, inconsistent sizes)"""


class DomainError(InputError):
    """Parameters outside the precondition of an operation"""


class OutOfScopeError(DomainError):
    """The bulk regime b <= 1/|a|, which this library does not treat"""


class TruncationError(GLStepError):
    """Far-field cutoff too short for the requested state"""


class ConditioningError(GLStepError):
    """A quantity divides by a boundary value that is numerically zero"""


class ResolutionError(GLStepError):
    """Results of a schedule are inconsistent at the current grid resolution"""


class ConvergenceError(GLStepError, RuntimeError):
    """An iterative solver stopped without meeting its tolerance"""

    def __init__(self, message: str, best: Any = None, report: Optional[Any] = None):
        super().__init__(message)
        self.best = best
        self.report = report


class BoundaryMinimumError(ConvergenceError):
    """A bracketed minimization kept landing on a bracket endpoint"""
