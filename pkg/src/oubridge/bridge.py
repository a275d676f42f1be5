"""Ornstein-Uhlenbeck bridge model: parameterization, drift, deterministic
flow and Gaussian moments.

The process on [s, T] pinned at x(T) = x_T solves

    dx = b(x, t) dt + sqrt(eps) dW,

with the bridge drift

    b(x, t) = a1 * [(x_T + a0/a1) - (x + a0/a1) cosh(a1 (T - t))]
              / sinh(a1 (T - t))            (a1 != 0)
    b(x, t) = (x_T - x) / (T - t)           (a1 == 0, Brownian bridge)

All hyperbolic ratios are evaluated through helpers that stay accurate for
arbitrarily small |a1| (no catastrophic cancellation), so every function in
this module is continuous in a1 across 0, while a1 == 0 takes an explicit
exact branch.  Everything is pure and float64; array arguments broadcast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "BridgeSpec",
    "Domain",
    "SpaceTimePoint",
    "sinhc",
    "sinh_ratio",
    "drift",
    "flow",
    "flow_dt",
    "mean_cov",
    "bridge_variance",
]

# Below this value of |a1|*max(|u|,|v|) the sinh ratio switches to a 4-term
# Taylor series in a1; the quartic correction is then < 1e-24, i.e. exact in
# float64.
_SERIES_THRESHOLD = 1e-6


@dataclass(frozen=True)
class BridgeSpec:
    """Drift parameters of the bridge: dx = (a0 + a1 x)dt + sqrt(eps) dW
    conditioned on x(T) = x_T.  a1 == 0 selects the Brownian-bridge drift
    (x_T - x)/(T - t); a0 is irrelevant in that limit and ignored."""

    a0: float
    a1: float
    T: float
    x_T: float

    def __post_init__(self):
        for name in ("a0", "a1", "T", "x_T"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v!r}")
        if self.T <= 0:
            raise DomainError(f"T must be positive, got {self.T}")

    @property
    def is_brownian(self) -> bool:
        return self.a1 == 0.0

    @property
    def fixed_point(self) -> float | None:
        """Fixed point -a0/a1 of the unconditioned drift (None for a1=0)."""
        if self.a1 == 0.0:
            return None
        return -self.a0 / self.a1

    def reflected(self) -> "BridgeSpec":
        """Image of the spec under the state reflection x -> -x."""
        return BridgeSpec(-self.a0, self.a1, self.T, -self.x_T)

    @classmethod
    def from_mapping(cls, data) -> "BridgeSpec":
        """Build from the scenario JSON keys a0, a1, T, xT."""
        try:
            return cls(float(data["a0"]), float(data["a1"]),
                       float(data["T"]), float(data["xT"]))
        except KeyError as exc:
            raise DomainError(f"missing bridge parameter {exc}") from exc


@dataclass(frozen=True)
class Domain:
    """Open interval (d1, d2) the process may exit from."""

    d1: float
    d2: float

    def __post_init__(self):
        if not (math.isfinite(self.d1) and math.isfinite(self.d2)):
            raise DomainError("domain endpoints must be finite")
        if not self.d1 < self.d2:
            raise DomainError(f"need d1 < d2, got ({self.d1}, {self.d2})")

    @property
    def width(self) -> float:
        return self.d2 - self.d1

    def contains(self, x: float) -> bool:
        return self.d1 < x < self.d2

    def reflected(self) -> "Domain":
        return Domain(-self.d2, -self.d1)

    @classmethod
    def from_mapping(cls, data) -> "Domain":
        try:
            return cls(float(data["d1"]), float(data["d2"]))
        except KeyError as exc:
            raise DomainError(f"missing domain parameter {exc}") from exc


@dataclass(frozen=True)
class SpaceTimePoint:
    """A start point (x, s) with s in [0, T)."""

    x: float
    s: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.s)):
            raise DomainError("point coordinates must be finite")
        if self.s < 0:
            raise DomainError(f"start time must be >= 0, got {self.s}")


def sinhc(z):
    """sinh(z)/z, exactly 1 at z = 0.  Broadcasts."""
    z = np.asarray(z, dtype=float)
    safe = np.where(z == 0.0, 1.0, z)
    out = np.where(z == 0.0, 1.0, np.sinh(safe) / safe)
    if out.ndim == 0:
        return float(out)
    return out


def _ratio_poly(w):
    # 4-term Taylor series of sinh(x)/x in x^2.
    return 1.0 + w / 6.0 + w * w / 120.0 + w * w * w / 5040.0


def sinh_ratio(a1, num, den):
    """sinh(a1*num)/sinh(a1*den), stable down to a1 = 0 (where it equals
    num/den).  Switches to a 4-term Taylor series once |a1|*max(|num|,|den|)
    drops below 1e-6.  den must be nonzero."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    small = abs(a1) * np.maximum(np.abs(num), np.abs(den)) < _SERIES_THRESHOLD
    an, ad = a1 * num, a1 * den
    series = (num / den) * (_ratio_poly(an * an) / _ratio_poly(ad * ad))
    if np.all(small):
        out = series
    else:
        direct = np.sinh(np.where(small, 0.0, an)) / np.sinh(np.where(small, 1.0, ad))
        out = np.where(small, series, direct)
    if np.ndim(out) == 0:
        return float(out)
    return out


# -- raw broadcasting kernels (no argument validation) ----------------------

def _drift(spec: BridgeSpec, x, t):
    T, a0, a1, x_T = spec.T, spec.a0, spec.a1, spec.x_T
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if a1 == 0.0:
        out = (x_T - x) / (T - t)
    else:
        th = a1 * (T - t)
        # b = (x_T - x)/((T-t) sinhc(th)) - (a1 x + a0) tanh(th/2); this is
        # Eq.-equivalent but free of the a0/a1 cancellation.
        out = (x_T - x) / ((T - t) * sinhc(th)) - (a1 * x + a0) * np.tanh(th / 2.0)
    if np.ndim(out) == 0:
        return float(out)
    return out


def _flow(spec: BridgeSpec, x, s, t):
    T, a0, a1, x_T = spec.T, spec.a0, spec.a1, spec.x_T
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if a1 == 0.0:
        out = (x * (T - t) + x_T * (t - s)) / (T - s)
    else:
        r1 = sinh_ratio(a1, T - t, T - s)
        r2 = sinh_ratio(a1, t - s, T - s)
        shift = (-0.5 * a0 * a1 * (T - t) * (t - s)
                 * sinhc(0.5 * a1 * (T - t)) * sinhc(0.5 * a1 * (t - s))
                 / np.cosh(0.5 * a1 * (T - s)))
        out = x * r1 + x_T * r2 + shift
    if np.ndim(out) == 0:
        return float(out)
    return out


def _flow_dt(spec: BridgeSpec, x, s, t):
    T, a0, a1, x_T = spec.T, spec.a0, spec.a1, spec.x_T
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if a1 == 0.0:
        out = (x_T - x) / (T - s)
    else:
        main = ((x_T * np.cosh(a1 * (t - s)) - x * np.cosh(a1 * (T - t)))
                / ((T - s) * sinhc(a1 * (T - s))))
        corr = (0.5 * a0 * a1 * (2.0 * t - T - s)
                * sinhc(0.5 * a1 * (2.0 * t - T - s))
                / np.cosh(0.5 * a1 * (T - s)))
        out = main + corr
    if np.ndim(out) == 0:
        return float(out)
    return out


def _variance(spec: BridgeSpec, s, v, t, eps):
    """Cov(x_v, x_t) for s <= v <= t <= T; nonnegative by construction."""
    T, a1 = spec.T, spec.a1
    s = np.asarray(s, dtype=float)
    v = np.asarray(v, dtype=float)
    t = np.asarray(t, dtype=float)
    out = eps * (v - s) * (T - t) / (T - s)
    if a1 != 0.0:
        out = out * (sinhc(a1 * (v - s)) * sinhc(a1 * (T - t))
                     / sinhc(a1 * (T - s)))
    if np.ndim(out) == 0:
        return float(out)
    return out


# -- validated public operations --------------------------------------------

def drift(spec: BridgeSpec, x: float, t: float) -> float:
    """Bridge drift b(x, t).  Singular at t = T: requires 0 <= t < T."""
    if np.any(np.asarray(t) >= spec.T) or np.any(np.asarray(t) < 0):
        raise DomainError(f"drift needs 0 <= t < T={spec.T}, got t={t}")
    return _drift(spec, x, t)


def flow(spec: BridgeSpec, start: SpaceTimePoint, t: float) -> float:
    """Deterministic (zero-noise) trajectory through (start.x, start.s),
    evaluated at t in [start.s, T].  flow(spec, start, T) == x_T exactly."""
    _check_start(spec, start)
    t_arr = np.asarray(t)
    if np.any(t_arr < start.s) or np.any(t_arr > spec.T):
        raise DomainError(f"flow needs s <= t <= T, got t={t}")
    return _flow(spec, start.x, start.s, t)


def flow_dt(spec: BridgeSpec, start: SpaceTimePoint, t: float) -> float:
    """Time derivative of the deterministic trajectory."""
    _check_start(spec, start)
    t_arr = np.asarray(t)
    if np.any(t_arr < start.s) or np.any(t_arr > spec.T):
        raise DomainError(f"flow_dt needs s <= t <= T, got t={t}")
    return _flow_dt(spec, start.x, start.s, t)


def mean_cov(spec: BridgeSpec, start: SpaceTimePoint, v: float, t: float,
             eps: float) -> tuple[float, float, float]:
    """Mean at v, mean at t, and Cov(x_v, x_t) of the bridge started at
    (start.x, start.s), for start.s <= v <= t < T."""
    _check_start(spec, start)
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")
    if not (start.s <= v <= t < spec.T):
        raise DomainError(f"need s <= v <= t < T, got v={v}, t={t}")
    mean_v = _flow(spec, start.x, start.s, v)
    mean_t = _flow(spec, start.x, start.s, t)
    cov = _variance(spec, start.s, v, t, eps)
    return mean_v, mean_t, cov


def bridge_variance(spec: BridgeSpec, start: SpaceTimePoint, t: float,
                    eps: float) -> float:
    """Var(x_t) of the bridge started at start; vanishes as t -> T."""
    _, _, cov = mean_cov(spec, start, t, t, eps)
    return cov


def _check_start(spec: BridgeSpec, start: SpaceTimePoint) -> None:
    if start.s >= spec.T:
        raise DomainError(f"start time {start.s} must be < T={spec.T}")
