"""Exception types raised across the package."""


class WeakrevError(Exception):
    """Base class for all package errors."""


class DimensionError(WeakrevError, ValueError):
    """Matrix or state has the wrong shape for the requested operation."""


class DomainError(WeakrevError, ValueError):
    """A scalar parameter lies outside its admissible range."""


class StateError(WeakrevError, ValueError):
    """A state vector or density matrix fails its structural checks."""


class CompletenessError(WeakrevError, ValueError):
    """Operators do not resolve the identity.

    The Frobenius residual of ``sum_r A_r^dag A_r - 1`` is kept on
    ``residual`` so callers can report how far off the set was.
    """

    def __init__(self, residual, tol):
        self.residual = float(residual)
        self.tol = float(tol)
        super().__init__(
            f"completeness violated: residual {self.residual:.3e} >= tolerance {self.tol:.1e}"
        )


class ZeroProbabilityError(WeakrevError, ValueError):
    """The requested outcome has (numerically) zero probability."""


class DegenerateOperatorError(WeakrevError, ValueError):
    """Operation needs a nonzero measurement operator."""


class NonReversibleError(WeakrevError, ValueError):
    """Outcome operator is singular, so no reversing operator exists."""


class InformationWasExtractedError(WeakrevError, ValueError):
    """Deterministic retrieval requested for a measurement that leaks information."""


class BoundViolationError(WeakrevError, RuntimeError):
    """The trade-off inequality failed beyond tolerance.

    The inequality is a theorem, so this signals a numerical or logic defect
    rather than bad user input.
    """
