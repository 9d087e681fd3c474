"""Exception hierarchy shared by every kmk module."""


class KMKError(Exception):
    """Base class for all kmk errors."""


class NotGCM(KMKError, ValueError):
    pass


class NotSymmetrizable(KMKError, ValueError):
    pass


class LeviNotFiniteType(KMKError, ValueError):
    pass


class NotFiniteType(KMKError, ValueError):
    pass


class IntervalTooLarge(KMKError):
    pass


class NotAReflection(KMKError, ValueError):
    pass


class NotACover(KMKError, ValueError):
    pass


class NotInPolynomialSubring(KMKError, ValueError):
    """A constant has a positive exponent in some simple root.

    Engine output should never trigger this; seeing it means the
    localization code is broken.
    """


class NonClearingEntry(KMKError, ArithmeticError):
    """A value expected to lie in R(T) kept a nontrivial denominator."""


class ResidueNotPolynomial(NonClearingEntry):
    pass


class DictionaryPinFailure(KMKError):
    """The localization conventions failed their rank-1 or duality check."""


class NonZeroRemainder(KMKError, ArithmeticError):
    pass


class VerificationFailure(KMKError):
    """A mathematical check failed (CLI exit status 2)."""
