"""Exception types shared across the package."""


class PcalError(Exception):
    """Base class for all library errors."""


class ValidationError(PcalError, ValueError):
    """Invalid argument, index or configuration."""


class SpecMismatchError(ValidationError):
    """Two signals combined pointwise live on different grids or shapes."""


class DegenerateFitError(PcalError):
    """Too few usable dyadic levels for a slope fit."""


class SolverError(PcalError):
    """A fixed-point iteration could not be brought to convergence."""
