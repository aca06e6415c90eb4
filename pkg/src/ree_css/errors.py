"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input violates a mathematical precondition of an operation."""


class VerificationError(RuntimeError):
    """A constructed object failed its post-construction checks."""


class EigenError(ArithmeticError):
    """The hermitian eigensolver did not converge."""


class ProjectionError(RuntimeError):
    """Alternating projections ran out of iterations before reaching feasibility.

    Attributes
    ----------
    violation : float
        Worst constraint violation at the last iterate.
    iterations : int
        Number of sweeps performed.
    """

    def __init__(self, message, violation, iterations):
        super().__init__(message)
        self.violation = violation
        self.iterations = iterations
