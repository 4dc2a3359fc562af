"""Exception types shared across the toolkit."""


class FconnError(Exception):
    """Base class for all toolkit errors."""


class ZeroDenominator(FconnError, ZeroDivisionError):
    pass


class VariableMismatch(FconnError, ValueError):
    pass


class InsufficientPrecision(FconnError):
    pass


class FactorizationInconclusive(FconnError):
    pass


class NotQuadraticPole(FconnError):
    pass


class NonSplitSpectrum(FconnError):
    pass


class NonSemisimpleLeading(FconnError):
    pass


class PoleReductionUnsupported(FconnError):
    pass


class Uncertified(FconnError):
    pass


class OddDegree(FconnError, ValueError):
    pass


class NegativeValuation(FconnError, ValueError):
    pass


class DegenerateDiscriminant(FconnError):
    pass


class OutOfBounds(FconnError):
    """Raised when an operator's output leaves the truncation window.

    ``partial`` holds the part of the result that stayed in bounds.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ComplexMismatch(FconnError, ValueError):
    pass


class InvalidAlgebra(FconnError, ValueError):
    pass


class SchemaError(FconnError, ValueError):
    pass
