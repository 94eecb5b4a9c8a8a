"""Exception hierarchy.

Two families matter to callers: :class:`DataError` (bad or insufficient
input data, CLI exit code 2) and :class:`NumericalError` (a computation
left its valid domain, CLI exit code 3). :class:`InvalidInput` covers
malformed arguments.
"""


class SpdSetError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(SpdSetError, ValueError):
    pass


class DimMismatch(InvalidInput):
    pass


class InvalidSpec(InvalidInput):
    pass


class InvalidResult(InvalidInput):
    pass


class NumericalError(SpdSetError, ArithmeticError):
    pass


class NotPositiveDefinite(NumericalError):
    pass


class Overflow(NumericalError, OverflowError):
    pass


class KernelNotPSD(NumericalError):
    pass


class ConvergenceFailure(NumericalError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class IllConditioned(NumericalError):
    pass


class DegenerateAlignment(NumericalError):
    pass


class DegenerateRepresentation(NumericalError):
    pass


class DataError(SpdSetError):
    pass


class DegenerateSet(DataError):
    pass


class EmptyDataset(DataError):
    pass


class InsufficientSets(DataError):
    pass


class FrameDecodeError(DataError):
    pass
