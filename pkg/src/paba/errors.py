"""Exception types shared by the model, solvers and simulator."""


class PabaError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(PabaError, ValueError):
    """An input violates a documented precondition."""


class InfeasibleError(PabaError):
    """No allocation can satisfy the constraints (zero channel, zero bandwidth, ...)."""


class SolverFailure(PabaError):
    """An iterative procedure did not converge within its iteration budget.

    Attributes:
        residuals: residual history recorded before giving up.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = list(residuals or [])
