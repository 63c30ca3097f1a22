class DomainError(ValueError):
    """
    A primitive was applied outside its domain, or produced a non-finite value.
    """


class TapeMismatchError(ValueError):
    """
    Handles recorded on different tapes were combined.
    """


class DimensionMismatchError(ValueError):
    pass


class NonConvergenceError(RuntimeError):
    def __init__(self, iterations: int, residual_norm: float):
        super().__init__(f"Convergence could not be reached after {iterations} iterations "
                         f"(residual max-norm {residual_norm:.3e})")
        self.iterations = iterations
        self.residual_norm = residual_norm


class SingularJacobianError(ArithmeticError):
    def __init__(self, column: int, pivot: float):
        super().__init__(f"Jacobian is singular: pivot {pivot:.3e} in column {column}")
        self.column = column
        self.pivot = pivot
