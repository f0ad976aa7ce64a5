"""Exception types shared across the package."""


class SolarArmaError(Exception):
    """Base class for errors raised by this package."""


class DataFormatError(SolarArmaError):
    """Input data violates the documented CSV schema or a series invariant."""


class FitError(SolarArmaError):
    """A single ARMA fit could not be completed (degenerate data, optimizer failure)."""


class SelectionError(SolarArmaError):
    """Model selection failed for an entire hour (no grid cell produced a usable fit)."""


class MissingModelError(SolarArmaError):
    """A modelled hour has no usable fitted model attached to it."""
