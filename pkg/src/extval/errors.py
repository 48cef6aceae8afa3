"""Exception types raised by the library."""


class ExtvalError(Exception):
    """Base class for all library errors."""


class EmptyInputError(ExtvalError, ValueError):
    pass


class InconsistentTableError(ExtvalError, ValueError):
    pass


class DegenerateInputError(ExtvalError, ValueError):
    """A measure is undefined for the given table (zero denominator)."""


class InvalidParameterError(ExtvalError, ValueError):
    def __init__(self, reasons):
        self.reasons = tuple(reasons)
        super().__init__("; ".join(self.reasons))
