"""Exception hierarchy shared by all qpp modules."""


class QppError(Exception):
    """Base class for all package-specific errors."""


class OrderMismatch(QppError):
    """Arithmetic between series of different truncation orders."""


class NotInvertible(QppError):
    """Series reciprocal requested with zero constant term."""


class BadConstantTerm(QppError):
    """exp/log/pow/compose precondition on the constant term violated."""


class NotRevertible(QppError):
    """Compositional inverse requested with zero linear coefficient."""


class DegenerateInput(QppError):
    """Input configuration with repeated points."""


class QZeroBranch(QppError):
    """An operation whose defining formula carries a 1/q prefactor was
    called with q = 0; use the dedicated q = 0 branch instead."""


class TooLarge(QppError):
    """Enumeration size beyond the documented bound."""


class InsufficientOrder(QppError):
    """Requested order exceeds the available Taylor data."""


class OutOfDomain(QppError):
    """Parameter outside the domain of validity of the transform."""


class UnknownPreset(QppError):
    """Unrecognized character preset name."""


class BadParams(QppError):
    """Non-finite or inconsistent density-model parameters."""


class QuadratureFailure(QppError):
    """Quadrature refinement did not reach the requested tolerance.

    Carries the best value and the achieved error estimate.
    """

    def __init__(self, message, value=None, estimate=None):
        super().__init__(message)
        self.value = value
        self.estimate = estimate


class TooCloseToSupport(QppError):
    """Stieltjes evaluation point too close to the support."""
