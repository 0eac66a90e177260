"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument violates a documented precondition."""


class CapacityError(RuntimeError):
    """A combinatorial guard was exceeded (the request is too large)."""


class ConstructionError(RuntimeError):
    """A seed construction failed; indicates a bug rather than bad input."""


class EllipticityError(RuntimeError):
    """Diagonal dominance of the second-order coefficients failed at a grid point."""

    def __init__(self, message, point=None, index=None, margin=None):
        super().__init__(message)
        self.point = point
        self.index = index
        self.margin = margin


class SolverError(RuntimeError):
    """The linear solver stagnated; carries the residual history."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history) if history is not None else []


class TuningError(RuntimeError):
    """No admissible epsilon was found; carries per-candidate diagnostics."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or []
