"""Point-to-boundary action and its minimizers.

The cost of forcing the bridge from (x, s) to a boundary value d at time t
has the closed form

    u(x, s; d, t) = a1 sinh(a1(T-s)) (d - x0(t))^2
                    / (2 sinh(a1(T-t)) sinh(a1(t-s))),

where x0 is the deterministic flow.  Its t-stationarity factors through a
function g(x, s; d, t) whose zeros locate the candidate optimal exit times;
g is returned here rescaled by 1/a1^2, which leaves zeros and signs
untouched and gives it a finite Brownian (a1 -> 0) limit

    g -> d (2t - T - s) + x (T - t) - x_T (t - s).

The exit quantity u(x, s) = min over boundaries and times; u vanishes
exactly when the deterministic flow itself leaves the domain, so the
computation splits on the deterministic first exit:

* finite deterministic exit: u = 0 and the flow is its own minimizer
  (all of family A and the Lambda1/Lambda2 part of case B_I_II);
* otherwise u > 0: per boundary, scan + bisect the zeros of g, evaluate the
  action at each and take the global minimum.  The minimizing root is chosen
  by comparing action values at all roots; the earliest/latest selection
  rule is asserted as a cross-check and any disagreement is logged.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._numerics import bisect, bisect_many
from .bridge import BridgeSpec, Domain, SpaceTimePoint, _drift, _flow, _flow_dt, sinhc
from .classify import Boundary, _check_point, _check_point_time, deterministic_exit
from .errors import (
    DomainError,
    NotApplicable,
    NotStronglyRegular,
    NumericalBlowup,
    UnsupportedBoundaryPin,
)

__all__ = [
    "Regularity",
    "PointToPointAction",
    "Minimizer",
    "ExitSolution",
    "OptimalPath",
    "action",
    "g_func",
    "dg_dt",
    "g_endpoints",
    "g_roots",
    "tau_star",
    "exit_solution",
    "optimal_path",
    "du_derivatives",
]

log = logging.getLogger(__name__)

# Number of uniform scan subintervals of (s, T) for g-root isolation.  g has
# at most three simple zeros per boundary, so this densely oversamples the
# minimal root separation in supported regimes.
N_SCAN = 4096

# Relative tie tolerance for declaring two minimizers equal.
TIE_TOL = 1e-9

# |dg/dt| below this (times a configuration scale) marks a degenerate
# minimizer.
DEGENERATE_TOL = 1e-8


class Regularity(str, enum.Enum):
    STRONGLY_REGULAR = "StronglyRegular"
    MULTIPLE_MINIMIZERS = "MultipleMinimizers"
    DEGENERATE_MINIMIZER = "DegenerateMinimizer"


@dataclass(frozen=True)
class PointToPointAction:
    value: float
    d: float
    t: float


@dataclass(frozen=True)
class Minimizer:
    d: float
    t: float


@dataclass(frozen=True)
class ExitSolution:
    u: float
    u1: Optional[float]  # min action to the lower boundary (None if not computed)
    u2: Optional[float]  # min action to the upper boundary
    minimizers: tuple[Minimizer, ...]
    regular: Regularity
    du_dx: Optional[float] = None
    d2u_dx2: Optional[float] = None

    def to_json(self) -> dict:
        return {
            "u": self.u,
            "u1": self.u1,
            "u2": self.u2,
            "minimizers": [{"d": m.d, "t": m.t} for m in self.minimizers],
            "regularity": self.regular.value,
            "du_dx": self.du_dx,
            "d2u_dx2": self.d2u_dx2,
        }


@dataclass(frozen=True)
class OptimalPath:
    """Closed-form minimizing path from (start.x, start.s) to (d, t_exit),
    with its control momentum alpha = dpath/dt - b(path, t)."""

    start: SpaceTimePoint
    d: float
    t_exit: float
    path: Callable[[float], float] = field(repr=False)
    momentum: Callable[[float], float] = field(repr=False)


# ---------------------------------------------------------------------------
# core broadcasting formulas

def _action_value(spec: BridgeSpec, x, s, d, t):
    """Action u(x, s; d, t); broadcasts, stable down to a1 = 0."""
    T, a1 = spec.T, spec.a1
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    p = t - s
    q = T - t
    dev = np.asarray(d) - _flow(spec, x, s, t)
    num = (T - s) * sinhc(a1 * (T - s)) * dev * dev
    den = 2.0 * q * p * sinhc(a1 * q) * sinhc(a1 * p)
    out = num / den
    if np.ndim(out) == 0:
        return float(out)
    return out


def _g(spec: BridgeSpec, x, s, d, t):
    """Stationarity function g/a1^2 (same zeros and signs as g)."""
    T, a0, a1, x_T = spec.T, spec.a0, spec.a1, spec.x_T
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    p = t - s
    q = T - t
    m = p - q  # = 2t - T - s
    out = (d * m * sinhc(a1 * m) + x * q * sinhc(a1 * q) - x_T * p * sinhc(a1 * p)
           - a0 * q * p * sinhc(0.5 * a1 * q) * sinhc(0.5 * a1 * p) * np.sinh(0.5 * a1 * m))
    if np.ndim(out) == 0:
        return float(out)
    return out


def _dg(spec: BridgeSpec, x, s, d, t):
    """t-derivative of the rescaled g."""
    T, a0, a1, x_T = spec.T, spec.a0, spec.a1, spec.x_T
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    p = t - s
    q = T - t
    m = p - q
    main = 2.0 * d * np.cosh(a1 * m) - x * np.cosh(a1 * q) - x_T * np.cosh(a1 * p)
    corr = 2.0 * a0 * (0.5 * p * sinhc(0.5 * a1 * p) * np.sinh(a1 * (0.5 * p - q))
                       - 0.5 * q * sinhc(0.5 * a1 * q) * np.sinh(a1 * (p - 0.5 * q)))
    out = main + corr
    if np.ndim(out) == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# public operations

def action(spec: BridgeSpec, start: SpaceTimePoint, d: float, t: float) -> PointToPointAction:
    """Minimal action among paths from (start.x, start.s) hitting value d at
    time t (s < t <= T).  At t = T the cost is 0 for d = x_T and +inf
    otherwise."""
    _check_point_time(spec, start)
    if t <= start.s:
        raise DomainError(f"action needs t > s={start.s}, got t={t}")
    if t > spec.T:
        raise DomainError(f"action needs t <= T={spec.T}, got t={t}")
    if t == spec.T:
        value = 0.0 if d == spec.x_T else math.inf
        return PointToPointAction(value, d, t)
    return PointToPointAction(_action_value(spec, start.x, start.s, d, t), d, t)


def g_func(spec: BridgeSpec, start: SpaceTimePoint, d: float, t: float) -> float:
    """Stationarity function at (d, t), rescaled by 1/a1^2 (finite at a1=0)."""
    _check_point_time(spec, start)
    if not start.s < t < spec.T:
        raise DomainError(f"g needs s < t < T, got t={t}")
    return _g(spec, start.x, start.s, d, t)


def dg_dt(spec: BridgeSpec, start: SpaceTimePoint, d: float, t: float) -> float:
    """t-derivative of the rescaled stationarity function."""
    _check_point_time(spec, start)
    if not start.s < t < spec.T:
        raise DomainError(f"dg_dt needs s < t < T, got t={t}")
    return _dg(spec, start.x, start.s, d, t)


def g_endpoints(spec: BridgeSpec, start: SpaceTimePoint, d: float) -> tuple[float, float]:
    """Limits of the rescaled g at t -> s and t -> T; handy for bracketing:
    g(s+) has the sign of (x - d) and g(T-) of (d - x_T)."""
    _check_point_time(spec, start)
    width = spec.T - start.s
    scale = width * sinhc(spec.a1 * width)
    return scale * (start.x - d), scale * (d - spec.x_T)


def g_roots(spec: BridgeSpec, start: SpaceTimePoint, d: float) -> list[tuple[float, int]]:
    """All zeros of t -> g(x, s; d, t) on (s, T), ascending, each with a
    degeneracy flag (2 when |dg/dt| at the root is below tolerance, which
    covers both tangent double roots and the pitchfork onset; 1 otherwise).

    Zeros are isolated by a 4096-interval scan and polished by bisection to
    1e-12; tangencies without sign change are recovered from local minima of
    |g| through a dg/dt sign change.
    """
    _check_point_time(spec, start)
    x, s, T = start.x, start.s, spec.T

    if spec.is_brownian:
        denom = x + spec.x_T - 2.0 * d
        if denom == 0.0:
            return []
        nu = s + (T - s) * (x - d) / denom
        if not s < nu < T:
            return []
        return [(nu, 1)]

    grid = np.linspace(s, T, N_SCAN + 1)
    gv = _g(spec, x, s, d, grid)
    gs_scale = max(1.0, float(np.max(np.abs(gv))))
    tol_g = 1e-9 * gs_scale

    roots: list[float] = []
    # Nodes that are exact zeros.
    zero_idx = np.nonzero(gv == 0.0)[0]
    for k in zero_idx:
        if 0 < k < N_SCAN:
            roots.append(float(grid[k]))
    # Sign-change brackets (skipping exact-zero endpoints).
    sgn = np.sign(gv)
    change = np.nonzero((sgn[:-1] * sgn[1:]) < 0)[0]
    if change.size:
        refined = bisect_many(lambda t: _g(spec, x, s, d, t),
                              grid[change], grid[change + 1], tol=1e-12)
        roots.extend(float(r) for r in refined)
    # Tangency candidates: interior local minima of |g| that are small but
    # do not change sign; refine on the dg/dt sign change.
    absg = np.abs(gv)
    interior = np.arange(1, N_SCAN)
    cand = interior[(absg[interior] <= absg[interior - 1])
                    & (absg[interior] <= absg[interior + 1])
                    & (absg[interior] < tol_g)
                    & (sgn[interior - 1] * sgn[interior + 1] > 0)]
    for k in cand:
        lo, hi = float(grid[k - 1]), float(grid[k + 1])
        dg_lo = _dg(spec, x, s, d, lo)
        dg_hi = _dg(spec, x, s, d, hi)
        if (dg_lo > 0) == (dg_hi > 0):
            continue
        t_c = bisect(lambda t: _dg(spec, x, s, d, t), lo, hi, tol=1e-12, f_lo=dg_lo)
        if abs(_g(spec, x, s, d, t_c)) <= tol_g:
            roots.append(t_c)

    roots.sort()
    merged: list[float] = []
    for r in roots:
        if not merged or r - merged[-1] > 1e-9 * (T - s):
            merged.append(r)

    dg_scale = max(1.0, gs_scale / (T - s))
    out = []
    for r in merged:
        mult = 2 if abs(_dg(spec, x, s, d, r)) < DEGENERATE_TOL * dg_scale else 1
        out.append((r, mult))
    return out


def tau_star(spec: BridgeSpec, domain: Domain) -> Optional[float]:
    """Pitchfork time: for start states on the x = x_T line, the time at
    which the single optimal exit time toward the far boundary splits into
    two symmetric minimizers.  Solves
    (d_far + a0/a1) = (x_T + a0/a1) cosh(a1 (T - tau)/2) by bisection on
    (-1e3 T, T) to 1e-12; None when no solution exists (including the
    Brownian limit and case B_IV).  May be negative; the associated
    Theta1/Theta2 sets are nonempty only when it falls in [0, T)."""
    from .classify import Family, classify  # local to avoid cycle at import

    label = classify(spec, domain)
    if label.family is not Family.B:
        raise NotApplicable(f"tau_star is defined for family B only, got {label}")
    if label.brownian:
        return None
    cspec, cdom = (spec.reflected(), domain.reflected()) if label.mirrored else (spec, domain)
    a1, T = cspec.a1, cspec.T
    c = cspec.a0 / a1
    lhs = cdom.d1 + c
    base = cspec.x_T + c
    if base == 0.0 or lhs / base < 1.0:
        return None

    def h(tau):
        try:
            ch = math.cosh(0.5 * a1 * (T - tau))
        except OverflowError:
            ch = math.inf
        return base * ch - lhs

    lo = -1e3 * T
    if (h(lo) > 0) == (h(T) > 0):
        return None
    return bisect(h, lo, T, tol=1e-12)


# ---------------------------------------------------------------------------
# exit solution

def exit_solution(spec: BridgeSpec, domain: Domain, start: SpaceTimePoint) -> ExitSolution:
    """Minimal boundary-exit action u(x, s), all its minimizers, and the
    regularity status.

    When the deterministic flow itself leaves the domain before T the action
    is zero and the flow's first exit is the minimizer; the status is
    StronglyRegular (series valid, q -> 1) unless the exit is tangential,
    which is reported as DegenerateMinimizer.  Otherwise u > 0 and the
    minimizers are located through the zeros of g on each boundary.
    """
    if spec.x_T == domain.d1 or spec.x_T == domain.d2:
        raise UnsupportedBoundaryPin(
            f"x_T={spec.x_T} on the boundary of ({domain.d1}, {domain.d2})")
    _check_point(spec, domain, start)

    det = deterministic_exit(spec, domain, start)
    if math.isfinite(det.tau0):
        return _zero_action_solution(spec, domain, start, det)

    x, s = start.x, start.s
    per_side: dict[float, list[tuple[float, int, float]]] = {}
    for d in (domain.d1, domain.d2):
        rts = g_roots(spec, start, d)
        if not rts:
            raise NumericalBlowup(
                f"no stationary exit time found for boundary {d} at {(x, s)}")
        per_side[d] = [(t, mult, _action_value(spec, x, s, d, t)) for t, mult in rts]

    u1 = min(a for _, _, a in per_side[domain.d1])
    u2 = min(a for _, _, a in per_side[domain.d2])
    u = min(u1, u2)
    tie = TIE_TOL * max(1.0, u)
    winners = [(d, t, mult) for d, entries in per_side.items()
               for t, mult, a in entries if a <= u + tie]
    _check_selection_rule(spec, domain, start, per_side)

    minimizers = tuple(Minimizer(d, t) for d, t, _ in winners)
    if len(winners) > 1:
        return ExitSolution(u, u1, u2, minimizers, Regularity.MULTIPLE_MINIMIZERS)
    d_star, nu_star, mult = winners[0]
    if mult == 2:
        return ExitSolution(u, u1, u2, minimizers, Regularity.DEGENERATE_MINIMIZER)
    du1, du2 = _derivative_formulas(spec, x, s, d_star, nu_star)
    return ExitSolution(u, u1, u2, minimizers, Regularity.STRONGLY_REGULAR,
                        du_dx=du1, d2u_dx2=du2)


def _zero_action_solution(spec, domain, start, det) -> ExitSolution:
    d_exit = domain.d1 if det.boundary is Boundary.LOWER else domain.d2
    # Side minima: 0 on every boundary the full deterministic trajectory
    # reaches before T; the opposite side is left uncomputed otherwise (the
    # g machinery is not invoked at zero-action points).
    from .classify import monotonicity

    mono = monotonicity(spec, start)
    probe_times = [start.s, spec.T]
    if mono.turning_time is not None:
        probe_times.insert(1, mono.turning_time)
    values = [_flow(spec, start.x, start.s, t) for t in probe_times]
    lo_reach = min(values) <= domain.d1
    hi_reach = max(values) >= domain.d2
    u1 = 0.0 if lo_reach else None
    u2 = 0.0 if hi_reach else None
    regular = (Regularity.DEGENERATE_MINIMIZER if det.tangential
               else Regularity.STRONGLY_REGULAR)
    kwargs = {}
    if regular is Regularity.STRONGLY_REGULAR:
        kwargs = dict(du_dx=0.0, d2u_dx2=0.0)
    return ExitSolution(0.0, u1, u2, (Minimizer(d_exit, det.tau0),), regular, **kwargs)


def _derivative_formulas(spec: BridgeSpec, x, s, d_star, nu_star):
    """First and second x-derivatives of u at a strongly regular point."""
    a1, T = spec.a1, spec.T
    du_dx = -(d_star - _flow(spec, x, s, nu_star)) / ((nu_star - s) * sinhc(a1 * (nu_star - s)))
    if a1 == 0.0:
        return du_dx, 0.0
    dgv = _dg(spec, x, s, d_star, nu_star)
    d2u = (-2.0 * (a1 * d_star + spec.a0) * a1 * (T - nu_star) ** 2
           * sinhc(a1 * (T - nu_star)) ** 2
           / ((T - s) * sinhc(a1 * (T - s)) * dgv))
    return du_dx, d2u


def _check_selection_rule(spec, domain, start, per_side) -> None:
    """Cross-check: on a multi-root boundary, the action minimizer should be
    the earliest root when x and that boundary lie on the same side of x_T,
    the latest when on opposite sides.  Disagreement is logged, never acted
    on (the action comparison is authoritative)."""
    x, x_T = start.x, spec.x_T
    if x == x_T:
        return
    for d, entries in per_side.items():
        if len(entries) < 2 or d == x_T:
            continue
        best = min(entries, key=lambda e: e[2])[0]
        same_side = (x - x_T > 0) == (d - x_T > 0)
        expected = min(e[0] for e in entries) if same_side else max(e[0] for e in entries)
        if abs(best - expected) > 1e-9 * (spec.T - start.s):
            log.warning(
                "root-selection rule disagrees with action comparison at "
                "(x=%g, s=%g, d=%g): rule %g vs action %g",
                x, start.s, d, expected, best)


# ---------------------------------------------------------------------------
# optimal paths and derivatives

def optimal_path(spec: BridgeSpec, start: SpaceTimePoint, d: float, t: float) -> OptimalPath:
    """Closed-form minimizing path gamma from (start.x, start.s) to (d, t)
    and its momentum alpha(v) = dgamma/dv - b(gamma(v), v).  Restricting the
    path between two of its own points reproduces the same functional form,
    so segments can be re-derived by re-pinning."""
    _check_point_time(spec, start)
    if not start.s < t < spec.T:
        raise DomainError(f"optimal_path needs s < t < T, got t={t}")
    # The fixed-endpoint minimizer has the same functional form as the
    # deterministic flow pinned at (d, t) instead of (x_T, T).
    pinned = BridgeSpec(spec.a0, spec.a1, t, d)
    x, s = start.x, start.s

    def path(v):
        return _flow(pinned, x, s, v)

    def momentum(v):
        return _flow_dt(pinned, x, s, v) - _drift(spec, path(v), v)

    return OptimalPath(start=start, d=d, t_exit=t, path=path, momentum=momentum)


def du_derivatives(spec: BridgeSpec, domain: Domain, start: SpaceTimePoint) -> tuple[float, float]:
    """(du/dx, d2u/dx2) at a strongly regular point; raises
    NotStronglyRegular elsewhere (finite differences across kinks are the
    caller's responsibility to avoid)."""
    sol = exit_solution(spec, domain, start)
    if sol.regular is not Regularity.STRONGLY_REGULAR:
        raise NotStronglyRegular(f"point ({start.x}, {start.s}) is {sol.regular.value}")
    return sol.du_dx, sol.d2u_dx2
