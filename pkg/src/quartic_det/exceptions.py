"""Exception hierarchy shared by all modules."""


class QuarticDetError(Exception):
    """Base class for errors raised by quartic_det."""


class ConfigurationError(QuarticDetError, ValueError):
    """Malformed potential description, grid, or run configuration."""


class PrecisionError(QuarticDetError):
    """A requested quantity cannot be evaluated to useful precision."""


class StiffnessError(QuarticDetError):
    """The adaptive integrator's step size underflowed."""


class IntegrationRangeError(QuarticDetError):
    """|k| * gamma exceeds the integrator guard; rescale the problem."""


class DomainError(QuarticDetError, ValueError):
    """Spectral parameter outside the domain of a closed-form formula."""


class RadiusError(QuarticDetError):
    """Contour quadrature for Laurent coefficients failed to converge."""


class RegionError(QuarticDetError):
    """Argument-principle region has a zero on (or too near) its boundary."""


class IterationError(QuarticDetError):
    """An iterative eigen-solver did not converge."""
