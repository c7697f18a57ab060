"""Double-double arithmetic and Sturm-count kernels.

A double-double value is an unevaluated sum ``hi + lo`` with
``|lo| <= ulp(hi)/2``, giving roughly 32 significant digits.  Products use
Dekker splitting so no fused multiply-add is required.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from numba import njit

_SPLITTER = 134217729.0  # 2**27 + 1


@njit(cache=True, inline="always")
def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@njit(cache=True, inline="always")
def quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


@njit(cache=True, inline="always")
def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


@njit(cache=True, inline="always")
def two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


@njit(cache=True, inline="always")
def dd_add(ah, al, bh, bl):
    s, e = two_sum(ah, bh)
    t, f = two_sum(al, bl)
    e += t
    s, e = quick_two_sum(s, e)
    e += f
    return quick_two_sum(s, e)


@njit(cache=True, inline="always")
def dd_sub(ah, al, bh, bl):
    return dd_add(ah, al, -bh, -bl)


@njit(cache=True, inline="always")
def dd_mul(ah, al, bh, bl):
    p, e = two_prod(ah, bh)
    e += ah * bl + al * bh
    return quick_two_sum(p, e)


@njit(cache=True, inline="always")
def dd_div(ah, al, bh, bl):
    q1 = ah / bh
    ph, pl = dd_mul(q1, 0.0, bh, bl)
    rh, rl = dd_sub(ah, al, ph, pl)
    q2 = rh / bh
    ph, pl = dd_mul(q2, 0.0, bh, bl)
    rh, rl = dd_sub(rh, rl, ph, pl)
    q3 = rh / bh
    qh, ql = quick_two_sum(q1, q2)
    return dd_add(qh, ql, q3, 0.0)


@njit(cache=True, nogil=True)
def sturm_count_f64(d, e2, x, pivmin):
    """Number of eigenvalues strictly below ``x`` (LDL^T inertia, double precision)."""
    n = d.shape[0]
    count = 0
    q = d[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0.0:
        count += 1
    for i in range(1, n):
        q = (d[i] - x) - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            count += 1
    return count


@njit(cache=True, nogil=True)
def sturm_count_dd(dh, dl, e2h, e2l, xh, xl, pivmin):
    """Same recurrence as :func:`sturm_count_f64` carried in double-double."""
    n = dh.shape[0]
    count = 0
    qh, ql = dd_sub(dh[0], dl[0], xh, xl)
    if abs(qh) < pivmin:
        qh, ql = -pivmin, 0.0
    if qh < 0.0:
        count += 1
    for i in range(1, n):
        th, tl = dd_div(e2h[i - 1], e2l[i - 1], qh, ql)
        ah, al = dd_sub(dh[i], dl[i], xh, xl)
        qh, ql = dd_sub(ah, al, th, tl)
        if abs(qh) < pivmin:
            qh, ql = -pivmin, 0.0
        if qh < 0.0:
            count += 1
    return count


@njit(cache=True, nogil=True)
def bisect_f64(d, e2, k, lo, hi, tol, pivmin, max_iter):
    """Shrink ``[lo, hi]`` keeping ``count(lo) <= k < count(hi)``; returns the final bracket."""
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if sturm_count_f64(d, e2, mid, pivmin) <= k:
            lo = mid
        else:
            hi = mid
    return lo, hi


@njit(cache=True, nogil=True)
def bisect_dd(dh, dl, e2h, e2l, k, loh, lol, hih, hil, tol, pivmin, max_iter):
    """Double-double counterpart of :func:`bisect_f64`."""
    for _ in range(max_iter):
        wh, wl = dd_sub(hih, hil, loh, lol)
        if wh <= tol:
            break
        sh, sl = dd_add(loh, lol, hih, hil)
        mh, ml = 0.5 * sh, 0.5 * sl
        if sturm_count_dd(dh, dl, e2h, e2l, mh, ml, pivmin) <= k:
            loh, lol = mh, ml
        else:
            hih, hil = mh, ml
    return loh, lol, hih, hil


@njit(cache=True)
def dd_times_ints(gh, gl, ints):
    """Elementwise ``(gh + gl) * ints`` in double-double; ``ints`` must be exact doubles."""
    n = ints.shape[0]
    outh = np.empty(n)
    outl = np.empty(n)
    for i in range(n):
        outh[i], outl[i] = dd_mul(gh, gl, ints[i], 0.0)
    return outh, outl


def dd_from_fraction(x: Fraction) -> tuple[float, float]:
    hi = float(x)
    lo = float(x - Fraction(hi))
    return hi, lo


def dd_square(h: float, l: float) -> tuple[float, float]:
    return dd_mul(h, l, h, l)


def dd_to_fraction(h: float, l: float) -> Fraction:
    return Fraction(h) + Fraction(l)
