"""Exception hierarchy.

Every exception derives from :class:`QChanError` (itself a ``ValueError``) so
callers can catch the whole family at once.  Messages name the violated
invariant and its magnitude.
"""


class QChanError(ValueError):
    pass


class DimensionMismatch(QChanError):
    pass


class ParameterOutOfRange(QChanError):
    pass


# states

class InvalidState(QChanError):
    pass


class NotHermitian(InvalidState):
    pass


class NotPositive(InvalidState):
    pass


class TraceNotOne(InvalidState):
    pass


class NotNormalized(InvalidState):
    pass


class BlochOutOfBall(InvalidState):
    pass


class ProbabilityOutOfRange(ParameterOutOfRange):
    pass


# channels

class InvalidChannel(QChanError):
    pass


class ChoiNotPSD(InvalidChannel):
    pass


class TraceConditionViolated(InvalidChannel):
    pass


class NotBistochastic(InvalidChannel):
    pass


class NotErgodic(InvalidChannel):
    pass


class NoFixedPointFound(QChanError):
    pass


class CodeNotOrthonormal(QChanError):
    pass


# entropy-energy

class ConditionViolated(QChanError):
    """The entropy-energy premise does not hold for the given parameters."""


class NotCommuting(QChanError):
    pass


class OverlapExceedsKappa(QChanError):
    pass


class NotTraceless(QChanError):
    pass


class ParseError(QChanError):
    """An input file or inline JSON could not be read."""
