"""Exception hierarchy shared by every pindist module."""


class PindistError(Exception):
    """Base class for all errors raised by pindist."""


class NotPrime(PindistError, ValueError):
    pass


class EvenCharacteristic(PindistError, ValueError):
    pass


class SizeCapExceeded(PindistError):
    pass


class DivisionByZero(PindistError, ZeroDivisionError):
    pass


class DimensionMismatch(PindistError, ValueError):
    pass


class ResidualTooLarge(PindistError, ArithmeticError):
    """A floating-point evaluation strayed too far from the integer it must equal."""


class BackendUnsupported(PindistError):
    pass


class EmptySet(PindistError, ValueError):
    pass


class InvalidParam(PindistError, ValueError):
    pass


class HypothesisNotMet(PindistError):
    pass


class SizeExceedsSpace(PindistError, ValueError):
    pass


class FileFormatError(PindistError, ValueError):
    pass


class SpecParseError(PindistError, ValueError):
    def __init__(self, message: str, position: int = 0):
        super().__init__(f"{message} (at position {position})")
        self.position = position
