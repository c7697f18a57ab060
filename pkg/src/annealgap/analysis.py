"""Gap pipelines: field scans, minimum-gap search, scaling fits and the summary table."""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _dd
from ._optimize import INVPHI
from .errors import AnnealGapError, FitError, GapBelowResolution, UnsupportedOrderError
from .grover import grover_min_gap, lowest_two_levels
from .instanton import sharp_wall_alpha, tanh_instanton_alpha
from .model import INFINITY, check_order, zero_T_critical_point
from .sector import _check_precision, sector_gap

COARSE_POINTS = 33
GAMMA_REL_TOL = 1e-10
GAP_REL_TOL = 1e-3
DEFAULT_MIN_N = 40
TABLE_N_LIST = tuple(range(40, 121, 10))
TABLE_P_MAX = 31


def thread_count() -> int:
    """Worker cap from ``ANNEALGAP_THREADS``, defaulting to the core count."""
    env = os.environ.get("ANNEALGAP_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _parallel_map(fn, items, threads: int | None = None) -> list:
    items = list(items)
    n = min(threads or thread_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class GapPoint:
    gamma: float
    delta: float
    resolved: bool


@dataclass(frozen=True)
class GapCurve:
    p: float
    N: int
    precision: str
    points: tuple[GapPoint, ...]

    @property
    def gammas(self) -> np.ndarray:
        return np.array([q.gamma for q in self.points])

    @property
    def deltas(self) -> np.ndarray:
        """Gaps, NaN where unresolved."""
        return np.array([q.delta if q.resolved else np.nan for q in self.points])


def _gap_point(p, N: int, gamma: float, precision: str, gamma_lo: float = 0.0) -> GapPoint:
    if p == INFINITY:
        return GapPoint(float(gamma), lowest_two_levels(N, gamma).gap, True)
    try:
        return GapPoint(float(gamma), sector_gap(p, N, gamma, precision, gamma_lo), True)
    except GapBelowResolution:
        return GapPoint(float(gamma), math.nan, False)


def gamma_scan(p, N: int, gamma_lo: float, gamma_hi: float, n_points: int, precision: str = "standard",
               threads: int | None = None) -> GapCurve:
    """Gap on a uniform field grid; unresolved points are kept and flagged."""
    check_order(p)
    _check_precision(precision)
    if not gamma_lo < gamma_hi:
        raise ValueError(f"empty window [{gamma_lo!r}, {gamma_hi!r}]")
    if n_points < 3:
        raise ValueError(f"n_points must be >= 3, got {n_points}")
    grid = np.linspace(gamma_lo, gamma_hi, n_points)
    pts = _parallel_map(lambda g: _gap_point(p, int(N), float(g), precision), grid, threads)
    return GapCurve(p, int(N), precision, tuple(pts))


@dataclass(frozen=True)
class MinGapResult:
    """Location of the avoided crossing.

    The field is ``gamma_min + gamma_min_lo`` in double-double; ``gamma_min``
    alone is its nearest double.
    """

    p: float
    N: int
    gamma_min: float
    delta_min: float
    precision: str
    gamma_min_lo: float = 0.0
    evaluations: int = 0


def _golden_dd(f, gh: float, gl: float, a: float, b: float, stop, max_iter: int = 2000):
    """Golden section on offsets from a double-double reference field.

    Once the bracket is narrower than 1e-6 of its offsets, the reference is
    moved to the bracket centre so offsets keep full relative precision.
    """
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = f(gh, gl, c), f(gh, gl, d)
    n = 2
    for _ in range(max_iter):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = f(gh, gl, c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = f(gh, gl, d)
        n += 1
        if stop(gh, b - a, min(fc, fd)):
            break
        if b - a < 1e-6 * max(abs(a), abs(b)):
            s = 0.5 * (a + b)
            gh, gl = _dd.dd_add(gh, gl, s, 0.0)
            a, b, c, d = a - s, b - s, c - s, d - s
    x = c if fc <= fd else d
    h, l = _dd.dd_add(gh, gl, x, 0.0)
    return h, l, min(fc, fd), n


def locate_min_gap(p, N: int, precision: str = "standard", window: float | None = None) -> MinGapResult:
    """Coarse 33-point scan around Gamma_c, then golden section on the gap.

    Stops once the field bracket is below 1e-10 relative and also below
    1e-3 of the current gap divided by 2N, so that the bracket cannot
    inflate the reported minimum.  Standard mode raises
    :class:`GapBelowResolution` when the search reaches uncertifiable gaps.
    """
    check_order(p)
    _check_precision(precision)
    N = int(N)
    if p == INFINITY:
        g, d = grover_min_gap(N)
        return MinGapResult(p, N, g, d, precision)
    p = int(p)
    gc = zero_T_critical_point(p).gamma_c
    half = window if window is not None else max(0.2, 8.0 / N)
    grid = np.linspace(gc - half, gc + half, COARSE_POINTS)
    grid = grid[grid > 0]
    coarse = [_gap_point(p, N, float(g), precision) for g in grid]
    if not any(q.resolved for q in coarse):
        raise GapBelowResolution(
            f"no resolved gap for p={p}, N={N} in {precision} precision; try precision='extended'"
        )
    if not all(q.resolved for q in coarse):
        raise GapBelowResolution(
            f"gap minimum for p={p}, N={N} is below {precision} resolution; try precision='extended'"
        )
    vals = [q.delta for q in coarse]
    i = int(np.argmin(vals))
    g0 = float(grid[i])
    a = float(grid[max(i - 1, 0)]) - g0
    b = float(grid[min(i + 1, len(grid) - 1)]) - g0

    def f(gh, gl, off):
        h, l = _dd.dd_add(gh, gl, off, 0.0)
        q = _gap_point(p, N, h, precision, l)
        if not q.resolved:
            raise GapBelowResolution(
                f"gap near Gamma={h!r} is below {precision} resolution; try precision='extended'"
            )
        return q.delta

    # standard mode carries the field as a plain double, so stop at its ulp
    floor = 0.0 if precision == "extended" else 4e-16

    def stop(g, w, fb):
        if w <= floor * g:
            return True
        return w <= GAMMA_REL_TOL * g and 2.0 * N * w <= GAP_REL_TOL * fb

    gh, gl, dmin, n = _golden_dd(f, g0, 0.0, a, b, stop)
    return MinGapResult(p, N, gh, dmin, precision, gl, n + len(coarse))


def min_gap(p, N: int, precision: str = "standard") -> tuple[float, float]:
    """``(gamma_min, delta_min)``; see :func:`locate_min_gap`."""
    r = locate_min_gap(p, N, precision)
    return r.gamma_min, r.delta_min


def min_gap_sweep(p, N_list, precision: str = "extended", threads: int | None = None) -> list:
    """``(N, outcome)`` for each distinct N in increasing order.

    ``outcome`` is a :class:`MinGapResult`, or the exception raised for that
    size (typically :class:`GapBelowResolution`).
    """

    def one(N):
        try:
            return N, locate_min_gap(p, N, precision)
        except AnnealGapError as exc:
            return N, exc

    return _parallel_map(one, sorted(set(int(n) for n in N_list)), threads)


@dataclass(frozen=True)
class ScalingFit:
    points: tuple[tuple[int, float], ...]
    alpha: float
    intercept: float
    residual: float
    prefactor: bool = True


def scaling_fit(points, prefactor: bool = True, min_N: int | None = None) -> ScalingFit:
    """Least squares on log2(delta/N) = intercept - alpha N.

    ``points`` are ``(N, delta)`` pairs; non-finite or non-positive deltas
    count as unresolved and are left out.  ``prefactor=False`` fits
    log2(delta) instead.  ``min_N`` drops smaller sizes first.
    """
    used = []
    for N, d in points:
        if d is None or not np.isfinite(d) or d <= 0:
            continue
        if min_N is not None and N < min_N:
            continue
        used.append((int(N), float(d)))
    used.sort()
    if len(used) < 4:
        raise FitError(f"need at least 4 resolved points, got {len(used)}")
    Ns = np.array([u[0] for u in used], dtype=float)
    if Ns.max() < 2.0 * Ns.min():
        raise FitError(f"N range [{Ns.min():g}, {Ns.max():g}] spans less than a factor of 2")
    ds = np.array([u[1] for u in used])
    y = np.log2(ds / Ns) if prefactor else np.log2(ds)
    slope, intercept = np.polyfit(Ns, y, 1)
    resid = float(np.max(np.abs(y - (slope * Ns + intercept))))
    return ScalingFit(tuple(used), float(-slope), float(intercept), resid, prefactor)


@dataclass
class Table1Row:
    p: object
    gamma_c: float | None = None
    m_c: float | None = None
    alpha_sharp: float | None = None
    alpha_tanh: float | None = None
    alpha_simu: float | None = None
    provenance: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors


def _table_row(p, N_list, precision: str, with_simu: bool) -> Table1Row:
    row = Table1Row(p)
    try:
        check_order(p)
        if p == INFINITY or not 3 <= p <= TABLE_P_MAX:
            raise UnsupportedOrderError(p, f"table covers odd 3 <= p <= {TABLE_P_MAX}")
        p = int(p)
        row.p = p
    except AnnealGapError as exc:
        row.errors["row"] = str(exc)
        return row

    def cell(name, fn, source):
        t0 = time.perf_counter()
        try:
            setattr(row, name, fn())
            row.provenance[name] = source
        except AnnealGapError as exc:
            row.errors[name] = str(exc)
        row.timings[name] = time.perf_counter() - t0

    def crit():
        cp = zero_T_critical_point(p)
        row.m_c = cp.m_c
        row.provenance["m_c"] = "model.zero_T_critical_point (argmin of e_GS at Gamma_c)"
        return cp.gamma_c

    cell("gamma_c", crit, "model.zero_T_critical_point (bisection on min_m e_GS + Gamma)")
    cell("alpha_sharp", lambda: sharp_wall_alpha(p), "instanton.sharp_wall_alpha (single-spin overlap)")
    cell("alpha_tanh", lambda: tanh_instanton_alpha(p).alpha, "instanton.tanh_instanton_alpha (golden section on log width)")
    if with_simu:
        def simu():
            res = min_gap_sweep(p, N_list, precision, threads=1)
            pts = [(n, r.delta_min) for n, r in res if isinstance(r, MinGapResult)]
            return scaling_fit(pts, min_N=DEFAULT_MIN_N).alpha

        cell(
            "alpha_simu",
            simu,
            f"analysis.scaling_fit over min_gap, N={min(N_list)}..{max(N_list)}, {precision} precision, N prefactor",
        )
    return row


def table1_pipeline(p_list, N_list=TABLE_N_LIST, precision: str = "extended", with_simu: bool = True,
                    threads: int | None = None) -> list[Table1Row]:
    """One row per p; a failing cell is recorded in ``row.errors`` and the rest still run."""
    _check_precision(precision)
    return _parallel_map(lambda p: _table_row(p, tuple(N_list), precision, with_simu), list(p_list), threads)


def annealing_time_estimate(delta_min: float) -> tuple[float, float]:
    """Adiabatic time scales ``(delta^-2, delta^-1)``."""
    if not delta_min > 0:
        raise ValueError(f"delta_min must be positive, got {delta_min!r}")
    return delta_min**-2.0, 1.0 / delta_min
