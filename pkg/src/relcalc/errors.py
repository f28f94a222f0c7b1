"""Exception types shared across the package."""


class NotInDomainError(ValueError):
    """A point is not in the domain (or range) of a relation."""

    def __init__(self, what: str, residual_norm: float):
        self.residual_norm = residual_norm
        super().__init__(f"{what} (residual norm {residual_norm:.3e})")


class PreconditionError(ValueError):
    """An operation was called on a relation outside its precondition."""


class NumericalInconsistencyError(ArithmeticError):
    """Two independent routes to the same quantity disagree beyond tolerance.

    Usually the symptom of a rank decision made differently on each route.
    """

    def __init__(self, what: str, discrepancy: float, tolerance: float):
        self.discrepancy = discrepancy
        self.tolerance = tolerance
        super().__init__(f"{what}: discrepancy {discrepancy:.3e} exceeds {tolerance:.1e}")
