"""Static-approximation thermodynamics.

Freezing the imaginary-time magnetisation to a constant m, each spin sees
an effective field (Gamma, p m^(p-1)) and the free-energy density is

    f(m) = (p-1) m^p - (1/beta) log(2 cosh(beta r)),   r = sqrt(Gamma^2 + p^2 m^(2p-2)).

Stationary points satisfy m = (p m^(p-1) / r) tanh(beta r).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidTemperatureError, NoTransitionError, RegimeError
from .model import INFINITY, ZERO_T, check_order, gs_energy_density

LOW_T_MIN_ARGUMENT = 5.0
BOUNDARY_STEP = 0.05
BOUNDARY_GAMMA_MAX = 10.0
BOUNDARY_TOL = 1e-12


class Branch(str, enum.Enum):
    FERRO = "FERRO"
    QPARA = "QPARA"


@dataclass(frozen=True)
class FreeEnergyPoint:
    m: float
    f: float
    branch: Branch


@dataclass(frozen=True)
class PhasePoint:
    beta: float
    gamma_star: float
    m_jump: float


def _check_finite_order(p) -> int:
    check_order(p)
    if p == INFINITY:
        raise ValueError("p=INFINITY has closed forms: use classical_pinf_free_energy / pinf_transition_line")
    return int(p)


def _check_beta(beta) -> None:
    if not beta > 0:
        raise InvalidTemperatureError(f"beta must be positive or ZERO_T, got {beta!r}")


def log2cosh(x):
    """log(2 cosh x) without overflow: |x| + log1p(exp(-2|x|))."""
    ax = np.abs(np.asarray(x, dtype=float))
    out = ax + np.log1p(np.exp(-2.0 * ax))
    return float(out) if out.ndim == 0 else out


def _field(p: int, gamma: float, m):
    return np.sqrt(gamma * gamma + (p * p) * np.asarray(m, dtype=float) ** (2 * p - 2))


def free_energy(p, beta, gamma, m):
    """Static free-energy density; ``beta=ZERO_T`` returns the ground-state energy density."""
    p = _check_finite_order(p)
    _check_beta(beta)
    if beta == ZERO_T:
        return gs_energy_density(p, gamma, m)
    m_arr = np.asarray(m, dtype=float)
    r = _field(p, gamma, m_arr)
    out = (p - 1) * m_arr**p - log2cosh(beta * r) / beta
    return float(out) if np.ndim(out) == 0 else out


def _stationarity(p: int, beta: float, gamma: float, m):
    # m - (h/r) tanh(beta r); its sign is that of df/dm for m > 0
    m = np.asarray(m, dtype=float)
    h = p * m ** (p - 1)
    r = np.sqrt(gamma * gamma + h * h)
    t = 1.0 if beta == ZERO_T else np.tanh(beta * r)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(r > 0, h / np.where(r > 0, r, 1.0), 0.0)
    return m - ratio * t


def _m_scan_grid() -> np.ndarray:
    lin = np.arange(1, 1001) * 1e-3
    near_one = 1.0 - np.geomspace(1e-12, 1e-3, 60)
    return np.unique(np.concatenate([lin, near_one]))


_SCAN = _m_scan_grid()


def magnetization_solutions(p, beta, gamma) -> list[FreeEnergyPoint]:
    """m = 0 plus every locally stable ferromagnetic root of the self-consistency equation.

    Roots are located on a grid of step 1e-3 (refined towards m = 1) and
    polished by bracketing root search.  Only sign changes from - to + of
    df/dm are kept; the unstable root between the two minima is skipped.
    """
    p = _check_finite_order(p)
    _check_beta(beta)
    gamma = float(gamma)
    out = [FreeEnergyPoint(0.0, float(free_energy(p, beta, gamma, 0.0)), Branch.QPARA)]
    g = _stationarity(p, beta, gamma, _SCAN)
    g_fn = lambda x: float(_stationarity(p, beta, gamma, x))
    for i in range(len(_SCAN) - 1):
        if g[i] < 0.0 <= g[i + 1]:
            a, b = float(_SCAN[i]), float(_SCAN[i + 1])
            m = b if g[i + 1] == 0.0 else brentq(g_fn, a, b, xtol=1e-15, rtol=1e-15, maxiter=200)
            out.append(FreeEnergyPoint(float(m), float(free_energy(p, beta, gamma, m)), Branch.FERRO))
    return out


def _best_ferro(p, beta, gamma) -> FreeEnergyPoint | None:
    ferro = [s for s in magnetization_solutions(p, beta, gamma) if s.branch is Branch.FERRO]
    return min(ferro, key=lambda s: s.f) if ferro else None


def equilibrium(p, beta, gamma) -> FreeEnergyPoint:
    """Lowest free-energy solution; on an exact tie the ferromagnet wins."""
    sols = magnetization_solutions(p, beta, gamma)
    best = sols[0]
    for s in sols[1:]:
        if s.f <= best.f:
            best = s
    return best


def phase_boundary(p, beta) -> PhasePoint:
    """First-order field Gamma*(beta) where the ferro and paramagnetic free energies cross."""
    p = _check_finite_order(p)
    _check_beta(beta)

    def excess(gamma: float) -> float:
        fm = _best_ferro(p, beta, gamma)
        if fm is None:
            return math.inf
        return fm.f - float(free_energy(p, beta, gamma, 0.0))

    lo = 0.0
    if not excess(lo) < 0.0:
        raise NoTransitionError(f"no ferromagnetic phase at beta={beta!r} for p={p}")
    hi = lo + BOUNDARY_STEP
    while excess(hi) < 0.0:
        lo, hi = hi, hi + BOUNDARY_STEP
        if hi > BOUNDARY_GAMMA_MAX:
            raise NoTransitionError(f"ferromagnet persists beyond Gamma={BOUNDARY_GAMMA_MAX}")
    while hi - lo > BOUNDARY_TOL * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if excess(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    fm = _best_ferro(p, beta, lo)
    return PhasePoint(float(beta), 0.5 * (lo + hi), fm.m if fm is not None else float("nan"))


def pinf_transition_line(beta) -> float:
    """Gamma(beta) = arccosh(e^beta / 2) / beta for p = INFINITY.

    Written as (beta - log 2 + log1p(sqrt(1 - 4 e^(-2 beta)))) / beta so
    that large beta neither overflows nor loses digits.
    """
    _check_beta(beta)
    if beta == ZERO_T:
        return 1.0
    if beta < math.log(2.0):
        raise NoTransitionError(f"no transition for beta={beta!r} < log 2")
    disc = max(0.0, -math.expm1(math.log(4.0) - 2.0 * beta))
    return max(0.0, (beta - math.log(2.0) + math.log1p(math.sqrt(disc))) / beta)


def classical_pinf_free_energy(beta) -> float:
    """min(f_F, f_P) = min(-1, -log(2)/beta) for the classical p = INFINITY model."""
    _check_beta(beta)
    if beta == ZERO_T:
        return -1.0
    return min(-1.0, -math.log(2.0) / beta)


def excitation_gap(p, gamma, m) -> float:
    """Single-spin level splitting 2 sqrt(Gamma^2 + p^2 m^(2p-2))."""
    p = _check_finite_order(p)
    return float(2.0 * _field(p, gamma, m))


def low_T_energy(p, beta, gamma, m) -> float:
    """e_GS(Gamma, m) + 2 r exp(-2 beta r), valid once beta r >= 5."""
    p = _check_finite_order(p)
    _check_beta(beta)
    r = float(_field(p, gamma, m))
    if beta == ZERO_T:
        return gs_energy_density(p, gamma, m)
    if beta * r < LOW_T_MIN_ARGUMENT:
        raise RegimeError(f"beta*r = {beta * r:.3g} < {LOW_T_MIN_ARGUMENT}: low-temperature expansion invalid")
    return gs_energy_density(p, gamma, m) + 2.0 * r * math.exp(-2.0 * beta * r)
