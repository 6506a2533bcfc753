"""Exception types raised by the engine."""


class DescentKitError(Exception):
    """Base class for every error raised by descentkit."""


class BoundExceeded(DescentKitError):
    pass


class NotIrreducible(DescentKitError):
    pass


class NotPrime(DescentKitError):
    pass


class NotAbelian(DescentKitError):
    pass


class NotNormal(DescentKitError):
    pass


class NotComposable(DescentKitError):
    pass


class NotInjective(DescentKitError):
    pass


class NotMono(DescentKitError):
    pass


class NotCommutative(DescentKitError):
    pass


class NoSolution(DescentKitError):
    """A linear system has no solution."""


class HypothesisUnverified(DescentKitError):
    pass


class DimensionBound(DescentKitError):
    pass


class SpecError(DescentKitError):
    """Malformed case file or object description."""
