"""The p -> infinity (Grover) limit.

Only the all-up configuration carries classical energy E_c = -N.  Writing
the transverse term in its eigenbasis, the classical part is a rank-one
update and every eigenvalue solves

    (N / 2^N) * sum_k C(N, k) / (Gamma (N - 2k) - lam) = 1.

The 2^N terms are grouped by binomial multiplicity, so N in the thousands
is cheap.  Roots near the lowest pole are found in the shifted coordinate
eta = lam + Gamma N, where the pole offsets 2 Gamma j are exact and an
exponentially small eta keeps full relative precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from ._optimize import golden_section
from .errors import ConvergenceError, InvalidModelError, InvalidSizeError, PoleProximityError

POLE_GUARD = 1e-300
MAX_N = 1000


@dataclass(frozen=True)
class LevelPair:
    lambda0: float
    lambda1: float
    eta: float
    gap: float


@dataclass(frozen=True)
class DispersionProblem:
    """Secular equation in the shifted coordinate eta = lam + Gamma N.

    The condition is ``constant + eta * sum_j w_j / (o_j (o_j - eta)) - w0 / eta = 0``
    where ``o_j > 0`` are the pole offsets above the lowest pole, ``w_j``
    their weights and ``w0`` the weight of the lowest pole.  ``constant``
    (the eta-independent part, which suffers cancellation) is evaluated in
    exact rational arithmetic.
    """

    N: int
    gamma: float
    offsets: np.ndarray
    weights: np.ndarray
    w0: float
    constant: float

    @property
    def lowest_pole(self) -> float:
        return -self.gamma * self.N


def log_binomials(N: int) -> np.ndarray:
    k = np.arange(N + 1)
    return gammaln(N + 1) - gammaln(k + 1) - gammaln(N - k + 1)


def log_multiplicity_total(N: int) -> float:
    """log of sum_k C(N, k), computed in log space (equals N log 2)."""
    lb = log_binomials(N)
    top = lb.max()
    return float(top + math.log(math.fsum(np.exp(lb - top))))


@lru_cache(maxsize=64)
def _harmonic_binomial_sum(N: int) -> Fraction:
    # sum_{j=1}^{N} C(N, j) / j
    total = Fraction(0)
    c = 1
    for j in range(1, N + 1):
        c = c * (N - j + 1) // j
        total += Fraction(c, j)
    return total


def dispersion_problem(N: int, gamma: float, spectrum: str = "binomial") -> DispersionProblem:
    """Set up the secular equation.

    ``spectrum="binomial"`` keeps every transverse level with its exact
    multiplicity.  ``"collapsed"`` keeps only the lowest transverse level
    and lumps the other 2^N - 1 states at zero, the approximation behind the
    closed-form gap 2 N 2^(-N/2).
    """
    if int(N) != N or N < 1:
        raise InvalidSizeError(f"N must be a positive integer, got {N!r}")
    if N > MAX_N:
        raise InvalidSizeError(f"lowest-pole weight N 2^-N underflows beyond N={MAX_N}")
    if not gamma > 0:
        raise InvalidModelError(f"gamma must be positive, got {gamma!r}")
    N = int(N)
    g = Fraction(float(gamma))
    w0 = N * 2.0**-N
    if spectrum == "binomial":
        # j = N - k flips away from the lowest transverse level; C(N, k) = C(N, j)
        j = np.arange(1, N + 1)
        offsets = 2.0 * gamma * j
        weights = np.exp(log_binomials(N)[1:] + math.log(N) - N * math.log(2.0))
        const = Fraction(N, 2 ** (N + 1)) * _harmonic_binomial_sum(N) / g - 1
    elif spectrum == "collapsed":
        offsets = np.array([gamma * N])
        weights = np.array([N * -math.expm1(-N * math.log(2.0))])
        const = (1 - Fraction(1, 2**N)) / g - 1
    else:
        raise ValueError(f"unknown spectrum {spectrum!r}")
    return DispersionProblem(N, float(gamma), offsets, weights, w0, float(const))


def dispersion_lhs(N: int, gamma: float, lam: float) -> float:
    """(N/2^N) sum_k C(N,k) / (Gamma(N-2k) - lam), summed with ``math.fsum``."""
    N = int(N)
    k = np.arange(N + 1)
    den = gamma * (N - 2 * k) - lam
    if np.any(np.abs(den) < POLE_GUARD):
        raise PoleProximityError(f"lam={lam!r} sits on a pole of the dispersion relation")
    logw = log_binomials(N) + math.log(N) - N * math.log(2.0)
    return math.fsum(np.exp(logw) / den)


def _secular(prob: DispersionProblem, eta: float) -> float:
    o = prob.offsets
    smooth = math.fsum(prob.weights / (o * (o - eta)))
    return prob.constant + eta * smooth - prob.w0 / eta


def _bisect_root(f, lo: float, hi: float, max_iter: int = 4000) -> float:
    """Root of increasing ``f`` with f(lo) < 0 < f(hi), to full relative precision.

    Uses geometric midpoints while the bracket spans orders of magnitude on
    one side of zero, so exponentially small roots converge quickly.
    """
    for _ in range(max_iter):
        if lo > 0 and hi > 4 * lo:
            mid = math.sqrt(lo * hi)
        elif hi < 0 and lo < 4 * hi:
            mid = -math.sqrt(lo * hi)
        else:
            mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            return 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    raise ConvergenceError("dispersion bisection did not converge", bracket=(lo, hi))


def _roots(prob: DispersionProblem) -> tuple[float, float]:
    """eta of the split-off root below the lowest pole and of the first interior root."""
    f = lambda eta: _secular(prob, eta)

    # below the lowest pole: f rises from -1 at -inf to +inf at 0-
    a = -1.0
    while f(a) >= 0:
        a *= 2.0
        if a < -1e300:
            raise ConvergenceError("no bracket below the lowest pole", bracket=(a, 0.0))
    b = a
    while f(b) < 0:
        b *= 0.5
        if b > -1e-300:
            raise ConvergenceError("split-off root closer than 1e-300 to the pole", bracket=(a, b))
    eta0 = _bisect_root(f, 2.0 * b if f(2.0 * b) < 0 else a, b)

    # first inter-pole interval (0, offsets[0]): f runs from -inf to +inf
    top = prob.offsets[0]
    lo = min(top * 0.5, 1.0)
    while f(lo) >= 0:
        lo *= 0.5
        if lo < 1e-300:
            raise ConvergenceError("interior root closer than 1e-300 to the pole", bracket=(0.0, lo))
    hi = top * 0.5
    gap_hi = top * 0.5
    while f(hi) <= 0:
        gap_hi *= 0.5
        hi = top - gap_hi
        if hi >= top:
            # the root is pinned to the next pole closer than one ulp
            return eta0, math.nextafter(top, 0.0)
    eta1 = _bisect_root(f, lo, hi)
    return eta0, eta1


def lowest_two_levels(N: int, gamma: float, spectrum: str = "binomial") -> LevelPair:
    """Ground level (split off below -Gamma N) and first excited level."""
    if int(N) != N or N < 2:
        raise InvalidSizeError(f"lowest_two_levels needs N >= 2, got {N!r}")
    prob = dispersion_problem(N, gamma, spectrum)
    eta0, eta1 = _roots(prob)
    base = prob.lowest_pole
    eta0, eta1 = float(eta0), float(eta1)
    return LevelPair(base + eta0, base + eta1, eta0, eta1 - eta0)


def min_gap_asymptotic(N: int) -> float:
    """2 N 2^(-N/2)."""
    return 2.0 * N * 2.0 ** (-N / 2.0)


def perturbative_gs_energy(N: int, gamma: float) -> float:
    """-N - Gamma^2 below the transition, -Gamma N above it."""
    if gamma == 1.0:
        raise InvalidModelError("at transition, use lowest_two_levels")
    return -N - gamma * gamma if gamma < 1.0 else -gamma * N


def grover_min_gap(N: int, spectrum: str = "binomial") -> tuple[float, float]:
    """Minimum over Gamma of the gap, returned as ``(gamma_min, delta_min)``.

    With all binomial terms the avoided crossing sits at Gamma = 1 + O(1/N)
    (the classical level is pushed down by Gamma^2), so the search window is
    [1 - 2/N, 1 + 4/N].
    """
    N = int(N)
    lo, hi = 1.0 - 2.0 / N, 1.0 + 4.0 / N
    grid = np.linspace(lo, hi, 33)
    gaps = [lowest_two_levels(N, g, spectrum).gap for g in grid]
    i = int(np.argmin(gaps))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    x, fx, _ = golden_section(
        lambda g: lowest_two_levels(N, g, spectrum).gap,
        a,
        b,
        lambda a_, b_, fb: (b_ - a_) <= 1e-13 * b_ or 2.0 * N * (b_ - a_) <= 1e-6 * fb,
    )
    return float(x), float(fx)
