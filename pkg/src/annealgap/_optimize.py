"""Small bracketing routines used across modules."""

from __future__ import annotations

import math
from typing import Callable

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(
    f: Callable[[float], float],
    a: float,
    b: float,
    stop: Callable[[float, float, float], bool],
    max_iter: int = 400,
) -> tuple[float, float, int]:
    """Minimise a unimodal ``f`` on ``[a, b]``.

    ``stop(a, b, fbest)`` is consulted after every step.  Returns
    ``(xbest, fbest, n_iter)``.
    """
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for it in range(1, max_iter + 1):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = f(d)
        xbest, fbest = (c, fc) if fc <= fd else (d, fd)
        if stop(a, b, fbest):
            return xbest, fbest, it
    xbest, fbest = (c, fc) if fc <= fd else (d, fd)
    return xbest, fbest, max_iter


def bisect_sign(
    f: Callable[[float], float], lo: float, hi: float, xtol: float, max_iter: int = 200
) -> tuple[float, float]:
    """Bisection on the sign of ``f`` with ``f(lo) < 0 <= f(hi)``."""
    for _ in range(max_iter):
        if hi - lo <= xtol:
            return lo, hi
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return lo, hi
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return lo, hi
