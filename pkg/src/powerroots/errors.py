"""Exception and warning types raised across the package."""


class PowerRootsError(Exception):
    """Base class for all numerical and usage errors of this package."""


class RangeError(PowerRootsError, ArithmeticError):
    """A value overflowed, underflowed to zero, or became non-finite."""


class PoleError(PowerRootsError, ZeroDivisionError):
    """A Newton ratio was requested at (numerically) a zero of the polynomial."""


class DivByZeroError(PowerRootsError, ZeroDivisionError):
    """A denominator that the algorithm relies on vanished."""


class DepthError(PowerRootsError, ValueError):
    """Recursion depth guard exceeded."""


class NormalizationError(PowerRootsError, ValueError):
    """Input coefficients are not normalized as required."""


class DomainError(PowerRootsError, ValueError):
    """A parameter lies outside the domain where a formula is valid."""


class CapError(PowerRootsError):
    """A node count or iteration count would exceed its configured cap."""


class BracketError(PowerRootsError, ValueError):
    """Radius bracket endpoints do not enclose the requested root count."""


class CountUnstable(PowerRootsError):
    """Root counting stayed low-confidence up to the node cap."""


class SeparationError(PowerRootsError):
    """Extremal zero is not separated in modulus from the rest."""


class StallError(PowerRootsError):
    """Newton steps stopped decreasing; ``best`` holds the best iterate."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class NotConverged(PowerRootsError):
    """Iteration budget exhausted before the tolerance was met."""


class ParseError(PowerRootsError, ValueError):
    """Malformed text input."""


class UsageError(PowerRootsError):
    """Invalid command-line usage."""


class AmbiguityWarning(UserWarning):
    """Both square-root candidates fit equally well while descending."""


class SeparationUnknown(UserWarning):
    """No separation ratio was supplied, so no error bound is attached."""


class LowConfidence(UserWarning):
    """A Cauchy root count was far from an integer."""


class DegenerateCenter(UserWarning):
    """The Newton ratio vanished at a center; the center was perturbed."""
