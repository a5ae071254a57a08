"""Exception types raised by the solver and its file readers."""


class SiepError(Exception):
    """Base class. ``step`` is the induction step that failed, when known."""

    def __init__(self, message, step=None):
        if step is not None:
            message = f"step {step}: {message}"
        super().__init__(message)
        self.step = step


class DuplicateEigenvalues(SiepError):
    pass


class EigenvalueCollision(SiepError):
    pass


class JacobianSingular(SiepError):
    pass


class NoConvergence(SiepError):
    pass


class BudgetInfeasible(SiepError):
    pass


class WspLost(SiepError):
    pass


class SequenceExhausted(SiepError):
    pass


class StreamExhausted(SiepError):
    pass


class FormatError(ValueError):
    """Malformed input file."""
