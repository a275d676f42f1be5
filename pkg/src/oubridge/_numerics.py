"""Bracketed bisection and composite-Simpson quadrature helpers.

Root finding deliberately sticks to plain bisection on monotone brackets:
every bracket handed to these routines encloses exactly one sign change, so
convergence is guaranteed without derivative information.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NumericalBlowup


def bisect(f, lo: float, hi: float, tol: float = 1e-12, f_lo: float | None = None) -> float:
    """Root of f in [lo, hi] to absolute tolerance tol; f(lo), f(hi) must
    not have the same strict sign."""
    if f_lo is None:
        f_lo = f(lo)
    if f_lo == 0.0:
        return lo
    f_hi = f(hi)
    if f_hi == 0.0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise NumericalBlowup(f"root not bracketed on [{lo}, {hi}]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid == lo or mid == hi:
            return mid
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bisect_many(f, lo, hi, tol: float = 1e-12):
    """Vectorized bisection: f maps an array of abscissae to an array of
    values; lo/hi are arrays of bracket endpoints with a sign change each."""
    lo = np.asarray(lo, dtype=float).copy()
    hi = np.asarray(hi, dtype=float).copy()
    f_lo = f(lo)
    if lo.size == 0:
        return lo
    span = float(np.max(hi - lo))
    n_iter = max(1, int(math.ceil(math.log2(max(span / tol, 1.0)))) + 2)
    for _ in range(min(n_iter, 200)):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        take_lo = (f_mid > 0) == (f_lo > 0)
        lo = np.where(take_lo, mid, lo)
        f_lo = np.where(take_lo, f_mid, f_lo)
        hi = np.where(take_lo, hi, mid)
    return 0.5 * (lo + hi)


def simpson_fixed(f, a: float, b: float, n: int) -> float:
    """Composite Simpson rule with n (even) subintervals; f is vectorized."""
    if n % 2:
        n += 1
    t = np.linspace(a, b, n + 1)
    y = np.asarray(f(t), dtype=float)
    h = (b - a) / n
    return float(h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum()))


def simpson_adaptive(f, a: float, b: float, tol: float = 1e-8,
                     n_start: int = 64, n_max: int = 65536) -> float:
    """Composite Simpson with interval-count doubling until successive
    estimates agree to tol (absolute).  The refinement path is a smooth
    function of the endpoints, which keeps the result differentiable in
    (a, b) up to the tolerance."""
    if a == b:
        return 0.0
    prev = simpson_fixed(f, a, b, n_start)
    n = 2 * n_start
    while n <= n_max:
        cur = simpson_fixed(f, a, b, n)
        if abs(cur - prev) <= tol:
            return cur
        prev = cur
        n *= 2
    raise NumericalBlowup(
        f"Simpson quadrature did not reach tol={tol} on [{a}, {b}] "
        f"with {n_max} subintervals (last delta {abs(cur - prev):.3e})")
