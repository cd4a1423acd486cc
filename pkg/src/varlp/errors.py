"""Exception hierarchy. Every error is a ``ValueError`` so callers can catch broadly."""


class VarLpError(ValueError):
    pass


class NonUnitDomain(VarLpError):
    pass


class NonFinite(VarLpError):
    pass


class IndexOutOfRange(VarLpError):
    pass


class EmptySet(VarLpError):
    pass


class NegativeInput(VarLpError):
    pass


class ExponentBelowOne(VarLpError):
    pass


class ExponentAboveCap(VarLpError):
    pass


class LengthMismatch(VarLpError):
    pass


class ExponentOrderViolation(VarLpError):
    pass


class NonPositiveLambda(VarLpError):
    pass


class NonPositiveWeight(VarLpError):
    pass


class ModularOverflow(VarLpError, OverflowError):
    """The modular exceeds the double range at the requested lambda."""


class ToleranceTooSmall(VarLpError):
    pass


class BracketError(VarLpError):
    """The Luxemburg root could not be bracketed within the doubling cap."""


class OutOfDomain(VarLpError):
    pass


class NonPositiveEps(VarLpError):
    pass


class InvalidPermutation(VarLpError):
    pass


class NotMonotone(VarLpError):
    pass


class ZeroPiece(VarLpError):
    pass


class BadCuts(VarLpError):
    pass


class SpecMismatch(VarLpError):
    pass


class InstanceFormatError(VarLpError):
    pass
