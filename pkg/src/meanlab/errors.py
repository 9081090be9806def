"""Exception hierarchy shared by every meanlab module."""


class MeanLabError(ValueError):
    """Base class for all errors raised by meanlab."""


class InvalidInput(MeanLabError):
    """Malformed argument: wrong shape, non-finite entries, parameter out of range."""


class DomainError(MeanLabError):
    """A matrix spectrum lies outside the domain of the requested function."""


class IllConditioned(MeanLabError):
    """A matrix that must be inverted is numerically singular."""


class OutOfRange(MeanLabError):
    """A scalar target lies outside the range of the function being inverted."""


class HypothesisViolated(MeanLabError):
    """Inputs do not satisfy the order/ratio hypothesis a construction needs."""


class NumericalFailure(MeanLabError):
    """A construction completed but failed its own consistency check."""


class ParseError(MeanLabError):
    """Matrix file is not well-formed JSON or does not follow the schema."""


class ValidationError(MeanLabError):
    """Matrix file parsed but its contents are rejected (asymmetric, non-finite)."""
