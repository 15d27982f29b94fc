"""Exception types shared across the package."""


class MatrixError(ValueError):
    """Base class for matrix-domain failures."""


class NotHermitianError(MatrixError):
    """Input is too far from Hermitian to symmetrize away."""


class NotPSDError(MatrixError):
    """Matrix has an eigenvalue below the PSD tolerance band."""

    def __init__(self, message, min_eigenvalue=None, witness=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue
        self.witness = witness


class NotPDError(MatrixError):
    """Matrix is not strictly positive definite."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class NotPPTError(MatrixError):
    """Block fails the positive-partial-transpose precondition."""

    def __init__(self, message, gap=None):
        super().__init__(message)
        self.gap = gap


class ConvergenceError(MatrixError):
    """Eigensolver exhausted its sweep budget."""

    def __init__(self, message, residual=None, sweeps=None):
        super().__init__(message)
        self.residual = residual
        self.sweeps = sweeps


class BudgetExhaustedError(RuntimeError):
    """Rejection sampler ran out of attempts."""

    def __init__(self, message, attempts=None, acceptance_rate=None):
        super().__init__(message)
        self.attempts = attempts
        self.acceptance_rate = acceptance_rate
