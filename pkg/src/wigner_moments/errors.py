"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    pass


class DomainError(ValueError):
    pass


class InadmissibleStateError(DomainError):
    """Density or temperature is not positive."""


class UnsupportedOrderError(ValueError):
    pass


class NumericalFailureError(RuntimeError):
    """Eigensolver failure; ``state`` carries the offending input."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class SolverFailureError(RuntimeError):
    """Raised by the time integrator.

    ``cell`` and ``time`` locate the failure; ``trajectory`` holds the
    output recorded up to that point (set by ``run``).
    """

    def __init__(self, message, cell=None, time=None):
        super().__init__(message)
        self.cell = cell
        self.time = time
        self.trajectory = None
