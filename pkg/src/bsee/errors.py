"""Exception types raised by the solvers and the harness."""


class BseeError(Exception):
    """Base class for all package errors."""


class StructuralError(BseeError):
    """Shape, index, or alignment mismatch between objects."""


class DomainError(BseeError):
    """A scalar argument is outside its admissible range."""


class PreconditionError(BseeError):
    """A solver's standing condition on the time step is violated."""


class ConvergenceError(BseeError):
    """An iteration failed to converge.

    Carries the residual history and optional diagnostics so callers can
    inspect what happened.
    """

    def __init__(self, message, history=None, diagnostics=None):
        super().__init__(message)
        self.history = list(history) if history is not None else []
        self.diagnostics = dict(diagnostics) if diagnostics is not None else {}


class BackendError(BseeError):
    """A stochastic backend could not carry out a request (e.g. singular
    normal equations in the regression projection)."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics) if diagnostics is not None else {}


class ConfigError(BseeError):
    """An experiment configuration failed validation."""


class UnknownCaseError(BseeError):
    """A reference-case id is not in the catalog."""
