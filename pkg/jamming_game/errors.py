class JammingGameError(ValueError):
    """Base class for input and validation errors raised by the library."""


class DimensionMismatch(JammingGameError):
    pass


class DegenerateModel(JammingGameError):
    pass


class NegativeGain(JammingGameError):
    pass


class ZeroJammerChannel(JammingGameError):
    pass


class ParameterOutOfRange(JammingGameError):
    pass


class NotInFamily(JammingGameError):
    pass


class InfeasibleInitial(JammingGameError):
    pass


class InvalidCovariance(JammingGameError):
    pass


class InvalidTrials(JammingGameError):
    pass


class InvalidGameConfig(JammingGameError):
    pass


class InvalidSweep(JammingGameError):
    pass


class InvariantBreach(RuntimeError):
    """An internal invariant failed. Any occurrence is a bug."""
