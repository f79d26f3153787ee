"""Exception types raised by the simulation and metrology layers."""


class Su11Error(Exception):
    """Base class for library errors."""


class DimensionError(Su11Error, ValueError):
    """Operands live on different truncated Fock spaces."""


class CutoffError(Su11Error, ValueError):
    """A requested Fock level lies outside the retained space."""


class ConvergenceError(Su11Error, RuntimeError):
    """Too much probability weight was lost to truncation.

    ``suggested_max_total`` carries a cutoff that is expected to fix it.
    """

    def __init__(self, message, norm_deficit=None, suggested_max_total=None):
        super().__init__(message)
        self.norm_deficit = norm_deficit
        self.suggested_max_total = suggested_max_total


class PreconditionError(Su11Error, ValueError):
    """Input violates an assumption the operation relies on."""


class UnsupportedError(Su11Error, NotImplementedError):
    """Combination of inputs the library does not model."""


class ResourceError(Su11Error, MemoryError):
    """Requested dense object exceeds the configured size limit."""
