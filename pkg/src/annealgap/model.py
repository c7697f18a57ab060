"""Model parameters and zero-temperature critical quantities.

The Hamiltonian is the ferromagnetic p-spin model in a transverse field,

    H = -N m(sigma^z)^p - Gamma * sum_i sigma^x_i,

with m the per-site longitudinal magnetisation.  ``p = INFINITY`` selects
the Grover-like limit handled by :mod:`annealgap.grover`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ._optimize import bisect_sign, golden_section
from .errors import (
    ConvergenceError,
    CurieWeissOrderError,
    EvenOrderError,
    InvalidSizeError,
    InvalidTemperatureError,
    NegativeFieldError,
    OrderTooSmallError,
    UnsupportedOrderError,
)

INFINITY = math.inf
"""Symbolic interaction order of the p -> infinity limit."""

ZERO_T = math.inf
"""Symbolic inverse temperature selecting closed-form zero-temperature paths."""

MAX_CRITICAL_P = 1001


@dataclass(frozen=True)
class ModelSpec:
    p: float
    N: int
    gamma: float
    beta: float = ZERO_T

    @property
    def is_grover(self) -> bool:
        return self.p == INFINITY

    @property
    def zero_temperature(self) -> bool:
        return self.beta == ZERO_T


@dataclass(frozen=True)
class CriticalPoint:
    gamma_c: float
    m_c: float


def check_order(p) -> None:
    """Raise the appropriate :class:`UnsupportedOrderError` unless p is odd >= 3 or infinite."""
    if p == INFINITY:
        return
    if isinstance(p, bool) or not float(p).is_integer():
        raise UnsupportedOrderError(p, "must be an integer or INFINITY")
    p = int(p)
    if p < 2:
        raise OrderTooSmallError(p, "p must be >= 3")
    if p == 2:
        raise CurieWeissOrderError(p, "p=2 transition is continuous")
    if p % 2 == 0:
        raise EvenOrderError(p, "even p has a degenerate classical ground state")


def validate_spec(spec: ModelSpec) -> ModelSpec:
    """Check a :class:`ModelSpec`; returns it with ``p`` and ``N`` as ints where finite."""
    check_order(spec.p)
    if isinstance(spec.N, bool) or int(spec.N) != spec.N or spec.N < 1:
        raise InvalidSizeError(f"N must be a positive integer, got {spec.N!r}")
    if not spec.gamma >= 0:
        raise NegativeFieldError(f"transverse field must be >= 0, got {spec.gamma!r}")
    if not spec.beta > 0:
        raise InvalidTemperatureError(f"beta must be positive or ZERO_T, got {spec.beta!r}")
    p = spec.p if spec.p == INFINITY else int(spec.p)
    beta = ZERO_T if spec.beta == math.inf else float(spec.beta)
    return replace(spec, p=p, N=int(spec.N), gamma=float(spec.gamma), beta=beta)


def gs_energy_density(p: int, gamma, m):
    """Zero-temperature static energy density e_GS(Gamma, m); vectorises over ``m``."""
    m = np.asarray(m, dtype=float)
    out = (p - 1) * m**p - np.sqrt(gamma * gamma + (p * p) * m ** (2 * p - 2))
    return float(out) if out.ndim == 0 else out


def _de_dm(p, gamma, m):
    r = math.sqrt(gamma * gamma + p * p * m ** (2 * p - 2))
    return p * (p - 1) * m ** (p - 1) - p * p * (p - 1) * m ** (2 * p - 3) / r


def _d2e_dm2(p, gamma, m):
    r = math.sqrt(gamma * gamma + p * p * m ** (2 * p - 2))
    return (
        p * (p - 1) ** 2 * m ** (p - 2)
        - p * p * (p - 1) * (2 * p - 3) * m ** (2 * p - 4) / r
        + p**4 * (p - 1) ** 2 * m ** (4 * p - 6) / r**3
    )


def _m_grid() -> np.ndarray:
    # linear cover of [0.5, 1] plus geometric points crowding m -> 1 for large p
    lin = np.linspace(0.5, 1.0, 2001)
    geo = 1.0 - np.geomspace(1e-10, 0.5, 400)
    return np.unique(np.concatenate([lin, geo]))


_M_GRID = _m_grid()


def ferro_minimum(p: int, gamma: float, mtol: float = 1e-10) -> tuple[float, float]:
    """Ferromagnetic minimum of e_GS over m in [0.5, 1]: returns ``(m, e)``.

    For large p the paramagnetic plateau near m = 0.5 is flat to within
    rounding, so the well is taken as the rightmost grid local minimum
    rather than the plain argmin.
    """
    vals = gs_energy_density(p, gamma, _M_GRID)
    interior = np.flatnonzero((vals[1:-1] < vals[:-2]) & (vals[1:-1] <= vals[2:])) + 1
    i = int(interior[-1]) if interior.size else int(np.argmin(vals))
    a = _M_GRID[max(i - 1, 0)]
    b = _M_GRID[min(i + 1, len(_M_GRID) - 1)]
    m, e, _ = golden_section(
        lambda x: gs_energy_density(p, gamma, x), a, b, lambda lo, hi, _f: hi - lo <= mtol
    )
    # Newton polish on the stationarity condition, kept inside the bracket
    for _ in range(8):
        h = _d2e_dm2(p, gamma, m)
        if h <= 0:
            break
        step = _de_dm(p, gamma, m) / h
        trial = m - step
        if not a <= trial <= b:
            break
        m = trial
        if abs(step) < 1e-15:
            break
    m = float(m)
    return m, gs_energy_density(p, gamma, m)


def zero_T_critical_point(p: int, tol: float = 1e-10, max_iter: int = 200) -> CriticalPoint:
    """Field and magnetisation at which the ferro minimum meets the paramagnet (e = -Gamma)."""
    check_order(p)
    if p == INFINITY:
        return CriticalPoint(1.0, 1.0)
    p = int(p)
    if p > MAX_CRITICAL_P:
        raise UnsupportedOrderError(p, f"critical solver limited to p <= {MAX_CRITICAL_P}")

    def excess(gamma: float) -> float:
        return ferro_minimum(p, gamma)[1] + gamma

    lo, hi = 1.0, 2.0
    if not (excess(lo) < 0 <= excess(hi)):
        raise ConvergenceError("critical field not bracketed by [1, 2]", bracket=(lo, hi))
    lo, hi = bisect_sign(excess, lo, hi, tol, max_iter=max_iter)
    if hi - lo > tol:
        raise ConvergenceError("critical-field bisection did not converge", bracket=(lo, hi))
    gamma_c = 0.5 * (lo + hi)
    m_c, _ = ferro_minimum(p, gamma_c)
    return CriticalPoint(gamma_c, m_c)


def asymptotic_critical_point(p) -> CriticalPoint:
    """Large-p expansion (1 + 1/2p, 1 - 1/2p^2)."""
    if p == INFINITY:
        return CriticalPoint(1.0, 1.0)
    return CriticalPoint(1.0 + 1.0 / (2 * p), 1.0 - 1.0 / (2 * p * p))
