"""Exception hierarchy shared across the package.

Domain errors signal bad inputs or out-of-class objects (CLI exit code 2);
conditioning errors signal numerical failures inside otherwise valid
computations (CLI exit code 3).
"""


class SmalelabError(Exception):
    """Base class for all package errors."""


class DomainError(SmalelabError, ValueError):
    """Input outside the documented domain of an operation."""


class InvalidZeroError(DomainError):
    """A Blaschke zero on or outside the guarded unit disk."""


class InvalidDegreeError(DomainError):
    """Formal degree smaller than the actual polynomial degree."""


class PoleEvaluationError(DomainError):
    """Evaluation point too close to a pole of the product."""


class NotNormalizedError(DomainError):
    """Product lacks the required simple zero at the origin."""


class VanishingDerivativeError(DomainError):
    """Derivative at the origin vanishes (origin zero of multiplicity >= 2)."""


class DegenerateQuotientError(DomainError):
    """A critical point sits numerically at the origin."""


class DegenerateNormalizationError(DomainError):
    """Derivative vanishes at the requested normalization point."""


class NoCriticalPointsError(DomainError):
    """Degree-1 products have no critical points."""


class ConditioningFailureError(SmalelabError):
    """A solve produced structurally inconsistent output."""


class BoundaryAmbiguityError(ConditioningFailureError):
    """A critical point could not be classified against the unit circle."""


class ConvergenceFailureError(ConditioningFailureError):
    """Root iteration failed to converge within its budget."""

    def __init__(self, message, best_iterate=None, residual=None):
        super().__init__(message)
        self.best_iterate = best_iterate
        self.residual = residual


class SearchFailureError(ConditioningFailureError):
    """An extremal search produced zero successful evaluations."""
