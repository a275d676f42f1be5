"""Exception hierarchy for the oubridge package."""


class OuBridgeError(Exception):
    """Base class for all oubridge errors."""


class DomainError(OuBridgeError, ValueError):
    """An argument lies outside the valid time/space range of an operation."""


class UnsupportedBoundaryPin(OuBridgeError, ValueError):
    """The pinned terminal state coincides with a boundary point; the
    classification is undefined there."""


class NotApplicable(OuBridgeError):
    """The requested quantity is not defined for this configuration."""


class NotStronglyRegular(OuBridgeError):
    """Derivatives/series were requested at a point whose exit minimizer is
    not unique and non-degenerate."""


class NumericalBlowup(OuBridgeError):
    """A quadrature or refinement loop failed to converge; carries
    diagnostics in the message."""


class UnsupportedOrder(OuBridgeError, ValueError):
    """A series order beyond the supported maximum was requested."""


class SeriesInvalidHere(OuBridgeError):
    """The asymptotic series does not hold at this point (kink or degenerate
    minimizer)."""


class ConfigError(OuBridgeError, ValueError):
    """Invalid Monte Carlo configuration."""


class InsufficientExits(OuBridgeError):
    """Too few exited paths to produce meaningful exit statistics."""
