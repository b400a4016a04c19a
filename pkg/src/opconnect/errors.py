"""Exception types raised across the library."""


class OpconnectError(Exception):
    """Base class for all library errors."""


class BackendUnsupported(OpconnectError):
    """Operation needs a numeric capability the active backend lacks."""


class InsufficientCoefficients(OpconnectError):
    """A recurrence was asked for coefficients past its stored range."""


class PositivityViolation(OpconnectError):
    """A coefficient that must be positive (beta_hat, alpha_hat, weight) is not."""


class InvalidFamily(OpconnectError):
    """Catalog family parameters out of range."""


class NoClosedForm(OpconnectError):
    """The (family, divisor) pair has no closed-form reference in the catalog."""


class InvalidDivisor(OpconnectError):
    """Divisor ratio is not sign-constant / normalizable on the measure support."""


class EigenFailure(OpconnectError):
    """Tridiagonal eigensolver exceeded its iteration cap."""


class IntegrandSingular(OpconnectError):
    """Integrand evaluated to a non-finite value at a quadrature node."""


class QuadratureDivergent(OpconnectError):
    """Adaptive integration failed to converge within the node/atom budget."""


class RegularityBreakdown(OpconnectError):
    """Forward recursion hit a vanishing pivot (kappa or lambda).

    The index attribute names the first coefficient that could not be produced.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class PrecisionExhausted(OpconnectError):
    """Working precision is insufficient to certify the requested output."""


class NotSymmetric(OpconnectError):
    """Symmetric-case operation applied to a recurrence with nonzero beta."""


class FactorizationUnavailable(OpconnectError):
    """Quadratic divisor does not split into real factors usable on the support."""


class OracleSingular(OpconnectError):
    """Oracle linear system (Gram block or Hankel matrix) is numerically singular."""
