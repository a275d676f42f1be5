"""Exit-time probabilities of scalar Ornstein-Uhlenbeck bridges: regime
classification, exact rate-function machinery, small-noise asymptotic
expansion, and exact-transition Monte Carlo validation."""

from .bridge import (
    BridgeSpec,
    Domain,
    SpaceTimePoint,
    drift,
    flow,
    flow_dt,
    mean_cov,
    bridge_variance,
)
from .errors import (
    OuBridgeError,
    DomainError,
    UnsupportedBoundaryPin,
    NotApplicable,
    NotStronglyRegular,
    NumericalBlowup,
    UnsupportedOrder,
    SeriesInvalidHere,
    ConfigError,
    InsufficientExits,
)

__version__ = "0.1.0"
