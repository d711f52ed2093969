"""Exception types shared across the package."""


class AdmissibilityError(ValueError):
    """Raised when input data violates a structural requirement
    (weight sign pattern, node ordering, nonlinearity conditions,
    parameter preconditions)."""


class NumericsError(RuntimeError):
    """Raised when a numerical procedure fails to reach its target."""


class StiffnessError(NumericsError):
    """Adaptive step size underflow; carries the failure time."""

    def __init__(self, time: float, message: str | None = None):
        self.time = time
        super().__init__(message or f"step size underflow at t={time:.12g}")
