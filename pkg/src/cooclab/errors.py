"""Exception hierarchy shared by every module."""


class CoocLabError(Exception):
    """Base class for all errors raised by cooclab."""


class InputError(CoocLabError, ValueError):
    """An argument violates a documented precondition."""


class NonSquareError(InputError):
    pass


class NegativeEntryError(InputError):
    pass


class RowSumOutOfToleranceError(InputError):
    pass


class TooLargeError(InputError):
    """Dense construction refused because the state space is too big."""


class LengthMismatchError(InputError):
    pass


class ShapeMismatchError(InputError):
    pass


class ZeroStationaryEntryError(InputError):
    pass


class NotSymmetricError(InputError):
    pass


class ArgOutOfRangeError(InputError):
    pass


class NotRegularError(CoocLabError):
    """The chain is reducible or periodic."""


class NoConvergenceError(CoocLabError):
    pass


class NotMixedWithinCapError(CoocLabError):
    pass


class MethodDisagreementError(CoocLabError):
    pass


class CliqueTooSmallError(InputError):
    pass


class GenerationFailedError(CoocLabError):
    pass


class IsolatedVertexUnresolvableError(GenerationFailedError):
    pass


class IsolatedVertexError(InputError):
    pass


class BadIndexError(InputError):
    pass


class LengthZeroError(InputError):
    pass


class WindowTooLargeError(InputError):
    pass


class NonSurjectiveError(InputError):
    pass


class NegativeWeightsError(InputError):
    pass


class StateSpaceTooLargeError(InputError):
    pass


class UnknownWindowError(InputError):
    pass


class DegenerateAllZeroError(CoocLabError):
    pass


class DegenerateInputError(InputError):
    pass


class EmptyInputError(InputError):
    pass
