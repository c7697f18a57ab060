"""Tunnelling exponent from imaginary-time magnetisation paths.

A path m(t), 0 <= t < beta, has per-site free energy

    f[m] = (1/beta) [ (p-1) int m^p dt - log Tr T-exp( int (Gamma sx + p m^(p-1) sz) dt ) ].

The time-ordered exponential is a product of exact 2x2 exponentials over
slices of width dt, with m sampled at slice midpoints.  A periodic path
with two kinks between the degenerate minima costs 2G above the
equilibrium value, which fixes the tunnelling amplitude eps = e^(-N G) of
an effective two-level system and thus alpha = G / ln 2 in
Delta ~ 2^(-alpha N).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._optimize import golden_section
from .errors import BoundaryMinimumError, DegeneracyError, DiscretizationError
from .model import INFINITY, check_order, zero_T_critical_point
from .statics import free_energy

SLICE_DENSITY = 200
DEGENERACY_TOL = 1e-6
WIDTH_BRACKET = (1e-2, 1e2)
WIDTH_REL_TOL = 1e-4


@dataclass(frozen=True)
class InstantonPath:
    """Samples of m(t) on ``n_slices`` equal slices of [0, beta].

    ``values`` holds the ``n_slices + 1`` node samples (first and last
    coincide for a periodic path); ``midpoints`` the slice-centre samples
    the propagator uses.  ``width`` and ``kink_times`` are ``None`` for
    paths that are not tanh kinks.
    """

    beta: float
    n_slices: int
    values: np.ndarray
    midpoints: np.ndarray
    width: float | None = None
    kink_times: tuple[float, float] | None = None

    @property
    def dt(self) -> float:
        return self.beta / self.n_slices

    @property
    def m_max(self) -> float:
        return float(max(np.max(np.abs(self.values)), np.max(np.abs(self.midpoints))))


@dataclass(frozen=True)
class InstantonResult:
    G: float
    alpha: float
    F: float
    width: float | None
    beta: float
    n_slices: int

    @property
    def epsilon_scale(self) -> str:
        return f"exp(-{self.G:.12g} N)"

    def epsilon(self, N: int) -> float:
        """Tunnelling amplitude e^(-N G)."""
        return math.exp(-N * self.G)

    def gap(self, N: int) -> float:
        """Splitting 2 eps of the two-level operator ((F, eps), (eps, F))."""
        return 2.0 * self.epsilon(N)


def required_slices(p: int, gamma: float, m_max: float, beta: float) -> int:
    """Trotter density rule: ceil(200 beta max(Gamma, p m_max^(p-1)))."""
    h = max(float(gamma), p * abs(m_max) ** (p - 1))
    return int(math.ceil(SLICE_DENSITY * beta * h))


def constant_path(m: float, beta: float, n_slices: int) -> InstantonPath:
    return InstantonPath(float(beta), int(n_slices), np.full(n_slices + 1, float(m)), np.full(n_slices, float(m)))


def tanh_profile(t, m_c: float, width: float, tau1: float, tau2: float):
    return m_c * (np.tanh((t - tau1) / width) - np.tanh((t - tau2) / width)) / 2.0


def two_kink_path(m_c: float, beta: float, width: float, n_slices: int) -> InstantonPath:
    """Plateau at m_c on [beta/4, 3 beta/4], zero elsewhere, joined by tanh kinks of width ``width``."""
    if not width > 0:
        raise ValueError(f"kink width must be positive, got {width!r}")
    tau1, tau2 = beta / 4.0, 3.0 * beta / 4.0
    # kinks sit beta/2 apart, and so does each kink from the other's periodic image
    if beta / 2.0 < 10.0 * width:
        raise DiscretizationError(f"beta={beta!r} too short for kinks of width {width!r}")
    dt = beta / n_slices
    nodes = tanh_profile(np.arange(n_slices + 1) * dt, m_c, width, tau1, tau2)
    mids = tanh_profile((np.arange(n_slices) + 0.5) * dt, m_c, width, tau1, tau2)
    return InstantonPath(float(beta), int(n_slices), nodes, mids, float(width), (tau1, tau2))


def _log_trace_product(h: np.ndarray, gamma: float, dt: float) -> float:
    """log Tr prod_a exp(dt (gamma sx + h_a sz)), multiplied pairwise with running normalisation."""
    r = np.sqrt(gamma * gamma + h * h)
    c = np.cosh(dt * r)
    # sinh(x)/x -> 1 as r -> 0
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(r > 0, np.sinh(dt * r) / np.where(r > 0, r, 1.0), dt)
    M = np.empty((h.shape[0], 2, 2))
    M[:, 0, 0] = c + s * h
    M[:, 1, 1] = c - s * h
    M[:, 0, 1] = M[:, 1, 0] = s * gamma
    log_scale = 0.0
    while M.shape[0] > 1:
        if M.shape[0] % 2:
            M = np.concatenate([M, np.eye(2)[None]])
        # later slices multiply from the left; the trace is cyclic so only order matters
        M = M[1::2] @ M[0::2]
        norms = np.abs(M).max(axis=(1, 2))
        M /= norms[:, None, None]
        log_scale += float(np.sum(np.log(norms)))
    return log_scale + math.log(M[0, 0, 0] + M[0, 1, 1])


def path_free_energy(p, gamma, path: InstantonPath, check: bool = True) -> float:
    """Per-site free energy of ``path`` (midpoint slices, exact 2x2 exponentials)."""
    check_order(p)
    if p == INFINITY:
        raise ValueError("path functional needs finite p")
    p = int(p)
    if check:
        need = required_slices(p, gamma, path.m_max, path.beta)
        if path.n_slices < need:
            raise DiscretizationError(f"n_slices={path.n_slices} below the required {need}")
    m = path.midpoints
    dt = path.dt
    classical = (p - 1) * math.fsum(m**p) * dt
    quantum = _log_trace_product(p * m ** (p - 1), float(gamma), dt)
    return (classical - quantum) / path.beta


def default_beta(width: float) -> float:
    return max(50.0, 100.0 * width)


def instanton_cost(p, gamma, beta: float | None = None, width: float = 0.1, critical=None) -> InstantonResult:
    """Per-kink action G of the two-kink tanh path at the transition.

    ``critical`` may pass a precomputed :class:`CriticalPoint`.
    """
    check_order(p)
    if p == INFINITY:
        raise ValueError("instanton path needs finite p; use sharp_wall_alpha for INFINITY")
    p = int(p)
    cp = critical or zero_T_critical_point(p)
    if abs(gamma - cp.gamma_c) > DEGENERACY_TOL:
        raise DegeneracyError(f"Gamma={gamma!r} is {abs(gamma - cp.gamma_c):.3g} away from Gamma_c={cp.gamma_c!r}")
    beta = default_beta(width) if beta is None else float(beta)
    f_eq = free_energy(p, beta, gamma, cp.m_c)
    f_para = free_energy(p, beta, gamma, 0.0)
    if abs(f_eq - f_para) > DEGENERACY_TOL:
        raise DegeneracyError(f"minima differ by {abs(f_eq - f_para):.3g} at beta={beta!r}")
    n = required_slices(p, gamma, cp.m_c, beta)
    path = two_kink_path(cp.m_c, beta, width, n)
    f_path = path_free_energy(p, gamma, path)
    G = beta * (f_path - f_eq) / 2.0
    return InstantonResult(G, G / math.log(2.0), f_eq, float(width), beta, n)


def tanh_instanton_alpha(p, bracket: tuple[float, float] = WIDTH_BRACKET, rel_tol: float = WIDTH_REL_TOL) -> InstantonResult:
    """Minimise the kink cost over the width by golden section on log(width)."""
    check_order(p)
    p = int(p)
    cp = zero_T_critical_point(p)
    lo, hi = math.log(bracket[0]), math.log(bracket[1])
    cost = lambda lw: instanton_cost(p, cp.gamma_c, width=math.exp(lw), critical=cp).G
    lw, _, _ = golden_section(cost, lo, hi, lambda a, b, _f: b - a <= rel_tol)
    edge = 1e-3 * (hi - lo)
    if lw - lo < edge or hi - lw < edge:
        raise BoundaryMinimumError(
            f"optimal width {math.exp(lw):.4g} sits on the search edge; widen the bracket",
            bracket=bracket,
        )
    return instanton_cost(p, cp.gamma_c, width=math.exp(lw), critical=cp)


def sharp_wall_overlap(p) -> float:
    """<F|Q> between the single-spin ground states at m = m_c and m = 0."""
    check_order(p)
    if p == INFINITY:
        return 1.0 / math.sqrt(2.0)
    p = int(p)
    cp = zero_T_critical_point(p)
    theta = math.atan2(cp.gamma_c, p * cp.m_c ** (p - 1))
    return math.cos(theta / 2.0 - math.pi / 4.0)


def sharp_wall_alpha(p) -> float:
    """alpha = -log2 <F|Q>; exactly 1/2 for p = INFINITY."""
    if p == INFINITY:
        return 0.5
    return -math.log2(sharp_wall_overlap(p))
