"""Scalar root bracketing, bisection and adaptive Simpson quadrature."""
from __future__ import annotations

import math
from typing import Callable

from .params import SolverError

Func = Callable[[float], float]


def bisect(f: Func, lo: float, hi: float, xtol: float = 1e-12, rtol: float = 0.0,
           maxiter: int = 500) -> float:
    """Bisection on a bracketing interval [lo, hi].

    Stops once the bracket width falls below ``xtol + rtol * |mid|``.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise SolverError(f"root not bracketed: f({lo})={flo}, f({hi})={fhi}")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= xtol + rtol * abs(mid):
            return mid
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    raise SolverError(f"bisection did not converge in {maxiter} iterations")


def expand_upper(f: Func, start: float, sign: float, factor: float = 2.0,
                 maxiter: int = 200) -> float:
    """Grow ``start`` geometrically until ``f`` has the requested sign."""
    x = start
    for _ in range(maxiter):
        value = f(x)
        if value * sign > 0:
            return x
        x *= factor
    raise SolverError(f"no sign change found up to x={x}")


def adaptive_simpson(f: Func, a: float, b: float, tol: float = 1e-9,
                     max_depth: int = 50) -> float:
    """Adaptive Simpson quadrature with Richardson correction."""
    if b == a:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, tol, max_depth)
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0
    return _simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth)


def _simpson_step(f: Func, a: float, b: float, fa: float, fm: float, fb: float,
                  whole: float, tol: float, depth: int) -> float:
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) * (fa + 4.0 * flm + fm) / 6.0
    right = (b - m) * (fm + 4.0 * frm + fb) / 6.0
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    return (_simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + _simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1))


def damped_fixed_point(g: Func, x0: float, damping: float = 0.5, tol: float = 1e-8,
                       maxiter: int = 500) -> float:
    """Iterate x <- (1 - damping) x + damping g(x) until the step is below ``tol``."""
    x = x0
    for _ in range(maxiter):
        nxt = (1.0 - damping) * x + damping * g(x)
        if not math.isfinite(nxt):
            break
        if abs(nxt - x) < tol:
            return nxt
        x = nxt
    raise SolverError("damped fixed-point iteration failed to converge")
