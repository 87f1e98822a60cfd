"""Exception hierarchy shared by every gpot module."""


class GpotError(Exception):
    """Base class for all errors raised by gpot."""


class InvalidInput(GpotError, ValueError):
    """Malformed or inconsistent user input."""


class InvalidMatrix(InvalidInput):
    pass


class NotPsd(InvalidInput):
    pass


class DimMismatch(InvalidInput):
    pass


class InvalidEpsilon(InvalidInput):
    pass


class EmptyInput(InvalidInput):
    pass


class InsufficientSamples(InvalidInput):
    pass


class GridMismatch(InvalidInput):
    pass


class InvalidConfig(InvalidInput):
    pass


class MissingParameter(InvalidInput):
    pass


class NonPositiveData(InvalidInput):
    pass


class NumericalInconsistency(GpotError, ArithmeticError):
    """A quantity that must be nonnegative came out clearly negative."""
