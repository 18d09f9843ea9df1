"""Exception hierarchy. Everything subclasses ValueError so callers can catch broadly."""


class SigTradeError(ValueError):
    pass


class AlphabetMismatchError(SigTradeError):
    pass


class OrderError(SigTradeError):
    """A word or operation needs a higher truncation order than is available."""


class ShapeError(SigTradeError):
    pass


class CapacityError(SigTradeError):
    """A configuration would exceed a word-count or memory budget."""


class DataError(SigTradeError):
    pass


class DegenerateChannelError(DataError):
    pass


class SingularMatrixError(SigTradeError):
    def __init__(self, message, smallest_singular_value=None):
        super().__init__(message)
        self.smallest_singular_value = smallest_singular_value


class InstabilityError(SigTradeError):
    pass


class ConfigError(SigTradeError):
    pass


class MissingWordError(SigTradeError, KeyError):
    """A coefficient was requested for a word the signature does not store."""
