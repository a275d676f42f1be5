"""Regime classification for the bridge/domain configuration.

The configuration splits into family A (terminal pin outside [d1, d2]) and
family B (pin strictly inside).  Within each family the position of the
fixed point -a0/a1 relative to d1, d2, x_T selects a roman-numbered case,
with further subcases decided by cosh-ratio tests over the horizon.  Only
the orientations x_T > d2 (family A) and fixed point above x_T (family B)
are implemented directly; every other orientation is reduced to these by
the exact reflection x -> -x and flagged ``mirrored``.

Also in this module: the monotonicity table of the deterministic flow, the
separatrix region Omega, the critical tangent trajectories with their
tangency times, the Sigma/Lambda/Theta partitions, and the deterministic
first exit time tau0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._numerics import bisect
from .bridge import BridgeSpec, Domain, SpaceTimePoint, _flow, _flow_dt, sinhc
from .errors import DomainError, NotApplicable, UnsupportedBoundaryPin

__all__ = [
    "Family",
    "MonotonicityKind",
    "Monotonicity",
    "RegionTag",
    "Boundary",
    "CaseLabel",
    "CriticalTrajectory",
    "DeterministicExit",
    "monotonicity",
    "omega_contains",
    "classify",
    "critical_trajectory",
    "region_tag",
    "deterministic_exit",
    "reflect_point",
]

# Absolute tolerance on the defining equation of a partition boundary
# (Sigma2/Lambda2/Theta membership); these are measure-zero sets that tests
# construct exactly.
PARTITION_TOL = 1e-10

# |flow derivative| below this at tau0 marks a tangential exit.
TANGENT_TOL = 1e-8


class Family(str, enum.Enum):
    A = "A"
    B = "B"


class MonotonicityKind(str, enum.Enum):
    INCREASING = "Increasing"
    DECREASING = "Decreasing"
    CONSTANT = "Constant"
    DOWN_UP = "DownUp"
    UP_DOWN = "UpDown"


class RegionTag(str, enum.Enum):
    SIGMA1 = "Sigma1"
    SIGMA2 = "Sigma2"
    SIGMA3 = "Sigma3"
    LAMBDA1 = "Lambda1"
    LAMBDA2 = "Lambda2"
    LAMBDA3 = "Lambda3"
    THETA1 = "Theta1"
    THETA2 = "Theta2"
    THETA3 = "Theta3"
    WHOLE = "Whole"


class Boundary(str, enum.Enum):
    LOWER = "Lower"
    UPPER = "Upper"
    NONE = "None"


@dataclass(frozen=True)
class Monotonicity:
    kind: MonotonicityKind
    turning_time: Optional[float] = None  # present iff kind is DownUp/UpDown


@dataclass(frozen=True)
class CaseLabel:
    family: Family
    roman: Optional[str]  # "I".."VII"; None for the Brownian limit
    sub: Optional[str]  # "I"/"II"/"III" where the case subdivides
    mirrored: bool
    brownian: bool = False

    def __str__(self) -> str:
        if self.brownian:
            return "BrownianBridge"
        parts = [self.family.value, self.roman]
        if self.sub is not None:
            parts.append(self.sub)
        return "_".join(parts) + f"(mirrored={'true' if self.mirrored else 'false'})"


@dataclass(frozen=True)
class CriticalTrajectory:
    """Tangent deterministic trajectory of a case with a partition.

    t_tangent is the tangency time (t2 for the lower-tangent trajectory of
    A_VII_III, t4 for the upper-tangent one of B_I_II); t_second is the later
    time at which the A_VII_III critical trajectory crosses the upper
    boundary (t3), None otherwise.  curve evaluates the trajectory in the
    original (unreflected) coordinates.
    """

    t_tangent: float
    curve: Callable[[float], float]
    t_second: Optional[float] = None


@dataclass(frozen=True)
class DeterministicExit:
    tau0: float  # +inf when the flow never leaves the domain
    boundary: Boundary
    tangential: bool


def reflect_point(start: SpaceTimePoint) -> SpaceTimePoint:
    return SpaceTimePoint(-start.x, start.s)


# ---------------------------------------------------------------------------
# monotonicity / Omega

def monotonicity(spec: BridgeSpec, start: SpaceTimePoint) -> Monotonicity:
    """Monotonicity pattern of the deterministic flow on [s, T]."""
    _check_point_time(spec, start)
    x, s = start.x, start.s
    if spec.is_brownian:
        if spec.x_T > x:
            return Monotonicity(MonotonicityKind.INCREASING)
        if spec.x_T < x:
            return Monotonicity(MonotonicityKind.DECREASING)
        return Monotonicity(MonotonicityKind.CONSTANT)

    a1 = spec.a1
    c = spec.a0 / a1
    X = x + c
    XT = spec.x_T + c
    if XT == 0.0:
        if X == 0.0:
            return Monotonicity(MonotonicityKind.CONSTANT)
        kind = MonotonicityKind.DECREASING if X > 0 else MonotonicityKind.INCREASING
        return Monotonicity(kind)
    if X == 0.0:
        kind = MonotonicityKind.INCREASING if XT > 0 else MonotonicityKind.DECREASING
        return Monotonicity(kind)
    if (X > 0) != (XT > 0):
        kind = MonotonicityKind.DECREASING if X > 0 else MonotonicityKind.INCREASING
        return Monotonicity(kind)

    # Same-sign branch: the ratio against the cosh window decides.
    A = a1 * (spec.T - s)
    ch = math.cosh(A)
    ratio = X / XT
    if ratio <= 1.0 / ch:
        kind = MonotonicityKind.INCREASING if XT > 0 else MonotonicityKind.DECREASING
        return Monotonicity(kind)
    if ratio >= ch:
        kind = MonotonicityKind.DECREASING if XT > 0 else MonotonicityKind.INCREASING
        return Monotonicity(kind)
    # Non-monotone: the derivative vanishes once, at
    # tanh(a1 (t1 - s)) = (ratio cosh A - 1)/(ratio sinh A).
    arg = (ratio * ch - 1.0) / (ratio * math.sinh(A))
    t1 = s + math.atanh(arg) / a1
    kind = MonotonicityKind.DOWN_UP if XT > 0 else MonotonicityKind.UP_DOWN
    return Monotonicity(kind, turning_time=t1)


def omega_contains(spec: BridgeSpec, start: SpaceTimePoint) -> bool:
    """Whether (x, s) lies strictly between the separatrix curves, i.e. the
    flow through it is non-monotone."""
    _check_point_time(spec, start)
    if spec.is_brownian:
        return False
    c = spec.a0 / spec.a1
    XT = spec.x_T + c
    if XT == 0.0:
        return False
    ch = math.cosh(spec.a1 * (spec.T - start.s))
    ratio = (start.x + c) / XT
    return 1.0 / ch < ratio < ch


# ---------------------------------------------------------------------------
# case classification

def classify(spec: BridgeSpec, domain: Domain) -> CaseLabel:
    """Case label of the configuration.  The pin on a boundary point is
    rejected; a1 == 0 yields the Brownian-bridge label."""
    if spec.x_T == domain.d1 or spec.x_T == domain.d2:
        raise UnsupportedBoundaryPin(
            f"x_T={spec.x_T} coincides with a boundary of ({domain.d1}, {domain.d2})")
    family = Family.A if (spec.x_T < domain.d1 or spec.x_T > domain.d2) else Family.B

    if spec.is_brownian:
        return CaseLabel(family, None, None, mirrored=False, brownian=True)

    F = -spec.a0 / spec.a1
    if family is Family.A:
        if spec.x_T < domain.d1:
            lab = classify(spec.reflected(), domain.reflected())
            return CaseLabel(lab.family, lab.roman, lab.sub, mirrored=True)
        return _classify_a(spec, domain, F)
    if F < spec.x_T:
        lab = classify(spec.reflected(), domain.reflected())
        return CaseLabel(lab.family, lab.roman, lab.sub, mirrored=True)
    return _classify_b(spec, domain, F)


def _classify_a(spec: BridgeSpec, domain: Domain, F: float) -> CaseLabel:
    # Canonical orientation x_T > d2 > d1.
    d1, d2, x_T = domain.d1, domain.d2, spec.x_T
    c = -F
    ch_T = math.cosh(spec.a1 * spec.T)
    if F > x_T:
        roman = "I"
        sub = "I" if d2 + c <= (x_T + c) * ch_T else "II"
    elif F == x_T:
        roman, sub = "II", None
    elif F > d2:
        roman, sub = "III", None
    elif F == d2:
        roman, sub = "IV", None
    elif F > d1:
        roman = "V"
        sub = "I" if d2 + c <= (x_T + c) / ch_T else "II"
    elif F == d1:
        roman = "VI"
        sub = "I" if d2 + c <= (x_T + c) / ch_T else "II"
    else:
        roman = "VII"
        if d2 + c <= (x_T + c) / ch_T:
            sub = "I"
        elif d1 + c <= (x_T + c) / ch_T:
            sub = "II"
        else:
            sub = "III"
    return CaseLabel(Family.A, roman, sub, mirrored=False)


def _classify_b(spec: BridgeSpec, domain: Domain, F: float) -> CaseLabel:
    # Canonical orientation: fixed point at or above x_T (d2 > x_T > d1).
    d1, d2, x_T = domain.d1, domain.d2, spec.x_T
    c = -F
    if F > d2:
        sub = "I" if d2 + c >= (x_T + c) / math.cosh(spec.a1 * spec.T) else "II"
        return CaseLabel(Family.B, "I", sub, mirrored=False)
    if F == d2:
        return CaseLabel(Family.B, "II", None, mirrored=False)
    if F > x_T:
        return CaseLabel(Family.B, "III", None, mirrored=False)
    return CaseLabel(Family.B, "IV", None, mirrored=False)


# ---------------------------------------------------------------------------
# critical trajectories and partitions

def _canonical(spec: BridgeSpec, domain: Domain, mirrored: bool):
    if mirrored:
        return spec.reflected(), domain.reflected()
    return spec, domain


def critical_trajectory(spec: BridgeSpec, domain: Domain,
                        label: CaseLabel) -> CriticalTrajectory:
    """Tangent trajectory and its critical times for A_VII_III / B_I_II.

    For A_VII_III: t_tangent solves (d1+c) cosh(a1(T-t)) = x_T + c, the curve
    is (d1+c) cosh(a1 (t_tangent - t)) - c, and t_second is its later crossing
    of d2.  For B_I_II the analogous upper-tangent data is returned.  All
    roots are found by bisection to 1e-12.
    """
    key = (label.family, label.roman, label.sub)
    if key not in ((Family.A, "VII", "III"), (Family.B, "I", "II")):
        raise NotApplicable(f"no critical trajectory in case {label}")
    cspec, cdom = _canonical(spec, domain, label.mirrored)
    a1, T = cspec.a1, cspec.T
    c = cspec.a0 / a1
    x_T = cspec.x_T
    tangent_d = cdom.d1 if label.family is Family.A else cdom.d2

    def h(t):
        return (tangent_d + c) * math.cosh(a1 * (T - t)) - (x_T + c)

    t_tan = bisect(h, 0.0, T, tol=1e-12)

    def curve_canonical(t):
        t = np.asarray(t, dtype=float)
        out = (tangent_d + c) * np.cosh(a1 * (t_tan - t)) - c
        return float(out) if out.ndim == 0 else out

    t_second = None
    if label.family is Family.A:
        def h2(t):
            return curve_canonical(t) - cdom.d2

        t_second = bisect(h2, t_tan, T, tol=1e-12)

    if label.mirrored:
        def curve(t):
            return -curve_canonical(t)
    else:
        curve = curve_canonical
    return CriticalTrajectory(t_tangent=t_tan, curve=curve, t_second=t_second)


def region_tag(spec: BridgeSpec, domain: Domain, start: SpaceTimePoint) -> RegionTag:
    """Partition tag of the start point for cases that carry a partition;
    RegionTag.WHOLE when the case has none.

    A_VII_III points get Sigma tags (below/on/above the lower-tangent
    trajectory inside Omega); B_I_II gets Lambda tags relative to the
    upper-tangent trajectory; B_I_I, B_II and B_III get Theta tags (on the
    x = x_T line below/at the pitchfork time).  Membership of the
    measure-zero partition boundaries uses absolute tolerance 1e-10.
    """
    _check_point(spec, domain, start)
    label = classify(spec, domain)
    if label.brownian:
        return RegionTag.WHOLE
    cspec, cdom = _canonical(spec, domain, label.mirrored)
    cpt = reflect_point(start) if label.mirrored else start
    key = (label.family, label.roman, label.sub)

    if key == (Family.A, "VII", "III"):
        crit = critical_trajectory(spec, domain, label)
        xstar = crit.curve(cpt.s) if not label.mirrored else -crit.curve(cpt.s)
        in_omega = omega_contains(cspec, cpt)
        if in_omega and abs(cpt.x - xstar) <= PARTITION_TOL:
            return RegionTag.SIGMA2
        if in_omega and cpt.x < xstar:
            return RegionTag.SIGMA1
        return RegionTag.SIGMA3

    if key == (Family.B, "I", "II"):
        crit = critical_trajectory(spec, domain, label)
        xstar = crit.curve(cpt.s) if not label.mirrored else -crit.curve(cpt.s)
        in_omega = omega_contains(cspec, cpt)
        if in_omega and abs(cpt.x - xstar) <= PARTITION_TOL:
            return RegionTag.LAMBDA2
        if in_omega and cpt.x > xstar:
            return RegionTag.LAMBDA1
        return RegionTag.LAMBDA3

    if label.family is Family.B and (label.roman, label.sub) in (("I", "I"), ("II", None), ("III", None)):
        from .rate import tau_star  # deferred: rate builds on this module

        ts = tau_star(spec, domain)
        if ts is None or abs(cpt.x - cspec.x_T) > PARTITION_TOL:
            return RegionTag.THETA3
        if abs(cpt.s - ts) <= PARTITION_TOL:
            return RegionTag.THETA2
        if cpt.s < ts:
            return RegionTag.THETA1
        return RegionTag.THETA3

    return RegionTag.WHOLE


# ---------------------------------------------------------------------------
# deterministic exit

def deterministic_exit(spec: BridgeSpec, domain: Domain,
                       start: SpaceTimePoint) -> DeterministicExit:
    """First time the deterministic flow leaves (d1, d2), found by
    bracketing on monotone segments and bisection to 1e-12; +inf when the
    flow stays inside.  A tangential touch of a boundary at the turning
    point counts as an exit (Sigma2/Lambda2 points)."""
    _check_point(spec, domain, start)
    mono = monotonicity(spec, start)
    segments = [(start.s, spec.T)]
    if mono.turning_time is not None:
        segments = [(start.s, mono.turning_time), (mono.turning_time, spec.T)]

    x, s = start.x, start.s
    for lo, hi in segments:
        f_lo = _flow(spec, x, s, lo)
        f_hi = _flow(spec, x, s, hi)
        for d, side in ((domain.d1, Boundary.LOWER), (domain.d2, Boundary.UPPER)):
            g_lo, g_hi = f_lo - d, f_hi - d
            if g_lo == 0.0 and lo > s:
                return _make_exit(spec, start, lo, side)
            if g_hi == 0.0 or (g_lo > 0) != (g_hi > 0):
                tau = bisect(lambda t, d=d: _flow(spec, x, s, t) - d,
                             lo, hi, tol=1e-12, f_lo=g_lo)
                return _make_exit(spec, start, tau, side)
        # Tangential touch: the segment ends at a turning point whose flow
        # value sits on a boundary to within tolerance but without crossing.
        if hi == mono.turning_time:
            for d, side in ((domain.d1, Boundary.LOWER), (domain.d2, Boundary.UPPER)):
                if abs(f_hi - d) <= 10 * PARTITION_TOL * (1.0 + abs(d)):
                    return DeterministicExit(hi, side, tangential=True)
    return DeterministicExit(math.inf, Boundary.NONE, tangential=False)


def _make_exit(spec: BridgeSpec, start: SpaceTimePoint, tau: float,
               side: Boundary) -> DeterministicExit:
    speed = _flow_dt(spec, start.x, start.s, tau)
    return DeterministicExit(tau, side, tangential=abs(speed) <= TANGENT_TOL)


def _check_point_time(spec: BridgeSpec, start: SpaceTimePoint) -> None:
    if not 0.0 <= start.s < spec.T:
        raise DomainError(f"start time {start.s} outside [0, T={spec.T})")


def _check_point(spec: BridgeSpec, domain: Domain, start: SpaceTimePoint) -> None:
    _check_point_time(spec, start)
    if not domain.contains(start.x):
        raise DomainError(
            f"start state {start.x} outside the open domain ({domain.d1}, {domain.d2})")
