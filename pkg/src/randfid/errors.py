"""Exception hierarchy shared by every module of the package."""


class FidelityError(Exception):
    """Base class for all errors raised by :mod:`randfid`."""


class DomainError(FidelityError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class DimMismatch(FidelityError, ValueError):
    """Two states (or a state and a routine) disagree about the dimension."""


class NotHermitian(FidelityError, ValueError):
    pass


class TraceNotOne(FidelityError, ValueError):
    pass


class NotPSD(FidelityError, ValueError):
    """A matrix has an eigenvalue below the negative clamping threshold."""


class OffSimplex(FidelityError, ValueError):
    """An eigenvalue vector is not a point of the probability simplex."""


class EigenFailure(FidelityError, ArithmeticError):
    """LAPACK failed to converge on an eigendecomposition."""


class McmcNotConverged(FidelityError, RuntimeError):
    """The simplex Metropolis chain produced too few effective samples."""


class IllConditioned(FidelityError, ArithmeticError):
    """A linear system is too badly conditioned to be trusted.

    Attributes
    ----------
    condition : float
        Estimated condition number of the offending matrix.
    """

    def __init__(self, message, condition=float("nan")):
        super().__init__(message)
        self.condition = condition


class TruncationUnstable(FidelityError, ArithmeticError):
    """Cancellation in a series expansion exceeded the precision budget."""


class UnsupportedK(FidelityError, ValueError):
    """The closed form requires 2(K-1) to be a non-negative integer."""


class QuadratureFailure(FidelityError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""


class NormalizationDrift(FidelityError, ArithmeticError):
    """A numerically computed density needed a renormalization above 1%."""


class DegenerateVariance(FidelityError, ValueError):
    """The variance entering the gauge coefficient is (numerically) zero."""


class EmptySample(FidelityError, ValueError):
    pass
