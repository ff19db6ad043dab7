"""Exception types shared across the package.

All inherit from ValueError so callers can catch input problems uniformly;
the CLI maps them to exit code 1.
"""


class FracdilError(ValueError):
    """Base class for domain errors raised by this package."""


class EmptySetError(FracdilError):
    """Raised when an operation receives an empty dilation set."""


class ResolutionError(FracdilError):
    """Raised when a requested scale is below a set's representable resolution."""


class AdmissibilityError(FracdilError):
    """Raised when multiplier decay is insufficient for the requested bound."""


class GridError(FracdilError):
    """Raised for grid/band mismatches (shape, Nyquist, alignment)."""


class RegionGateError(FracdilError):
    """Raised when exponents fall outside the region that licenses an experiment."""
