"""Exception hierarchy shared across the package."""


class GsqcError(Exception):
    """Base class for all package errors."""


class ProgramError(GsqcError):
    """Invalid program description (bad field, slot conflict, non-unitary gate, ...)."""


class BasisSizeError(ProgramError):
    """Requested Hilbert-space dimension exceeds the configured cap."""


class SolverError(GsqcError):
    """Eigensolver failure unrelated to convergence (bracketing, dispatch, ...)."""


class ConvergenceError(SolverError):
    """Iterative eigensolver did not reach the requested residual.

    Carries the best residual achieved so callers can report diagnostics.
    """

    def __init__(self, message: str, best_residual: float | None = None):
        super().__init__(message)
        self.best_residual = best_residual


class ConsistencyError(GsqcError):
    """Solved ground state fails the development-equation residual check."""


class IndeterminateInputError(ConsistencyError):
    """Ground state carries no weight on the input block; residual undefined."""


class NonFactoringOutputError(GsqcError):
    """Readout scheme rejected: the program's final state does not factor."""


class BoundViolationError(GsqcError):
    """Measured gap exceeds the variational upper bound (broken gate term)."""
