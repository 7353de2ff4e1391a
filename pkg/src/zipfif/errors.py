"""Exception hierarchy shared by every zipfif module."""


class ZipfifError(Exception):
    """Base class for all library errors."""


class ValidationError(ZipfifError, ValueError):
    """Input data, signature or scaling factors break a construction invariant."""


class NonIncreasingKnots(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class NonFiniteValue(ValidationError):
    pass


class ContractionViolation(ValidationError):
    pass


class XOutOfDomain(ZipfifError, ValueError):
    pass


class DegenerateDenominator(ZipfifError, ArithmeticError):
    pass


class DenominatorCollapse(ZipfifError, ArithmeticError):
    pass


class DepthTooLarge(ZipfifError, ValueError):
    pass


class ToleranceNotReached(ZipfifError, RuntimeError):
    """Backward recursion hit its level cap before the error bound fell below tol."""


class SpecViolation(ZipfifError, ValueError):
    """A shape constraint is incompatible with the data it is meant to bound."""


class EmptyInterval(ZipfifError, ValueError):
    """A feasibility interval admits no value."""


class MissingKnot(ZipfifError, LookupError):
    pass
