"""Exception types raised by the numerical kernels."""


class CPnError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(CPnError, ValueError):
    pass


class GradeOverflow(CPnError, ValueError):
    pass


class DegenerateDenominator(CPnError, ArithmeticError):
    pass


class OutsideBigCell(CPnError, ValueError):
    """Homogeneous point with Z_0 = 0, outside the affine chart."""


class InvalidSimplexPoint(CPnError, ValueError):
    """Momentum coordinates violating 1 > c_1 >= ... >= c_n > 0."""


class NonconstantRatio(CPnError, AssertionError):
    pass


class EigenNoConvergence(CPnError, ArithmeticError):
    pass


class NoConventionMatches(CPnError, AssertionError):
    pass


class MultipleConventionsMatch(CPnError, AssertionError):
    pass


class NotTorusInvariant(CPnError, ValueError):
    pass


class NotClosed(CPnError, ValueError):
    """One-form fails the closedness test, so it has no potential."""


class LeftDomain(CPnError, RuntimeError):
    """Integrated state left the momentum simplex."""
