import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annealgap import (
    INFINITY,
    GapBelowResolution,
    build_sector_hamiltonian,
    dense_spectrum_oracle,
    gs_energy_density,
    locate_min_gap,
    lowest_eigenvalues,
    sector_gap,
    sturm_count,
)
from annealgap.errors import InvalidSizeError
from annealgap.model import ferro_minimum
from annealgap.sector import EXTENDED_REL_TOL, STANDARD_REL_TOL, TridiagonalOperator


def mp_sturm_count(p, N, gamma_hi, gamma_lo, x, dps=60):
    """Independent eigenvalue count below x in mpmath (exact entries, 60 digits)."""
    with mpmath.workdps(dps):
        g = mpmath.mpf(gamma_hi) + mpmath.mpf(gamma_lo)
        x = mpmath.mpf(x)
        count = 0
        q = None
        for j in range(N + 1):
            d = mpmath.mpf(-((2 * j - N) ** p)) / mpmath.mpf(N) ** (p - 1)
            q = d - x if j == 0 else (d - x) - g**2 * (N - j + 1) * j / q
            if q < 0:
                count += 1
        return count


def test_small_operator_entries():
    T = build_sector_hamiltonian(3, 2, 0.5)
    assert T.dim == 3
    np.testing.assert_allclose(T.diag, [2.0, 0.0, -2.0], atol=0)
    np.testing.assert_allclose(T.offdiag, [0.5 * math.sqrt(2)] * 2, rtol=1e-15)


def test_classical_diagonal():
    T = build_sector_hamiltonian(3, 10, 0.0)
    d = np.sort(T.diag)
    assert d[0] == -10.0
    assert d[1] == pytest.approx(-10 * 0.8**3, abs=1e-14)
    r = lowest_eigenvalues(T, 1)
    assert r.lower[0] <= -10.0 <= r.upper[0]
    assert sector_gap(3, 10, 0.0) == pytest.approx(10 * (1 - 0.8**3), abs=1e-12)


def test_offdiag_symmetry_and_odd_N():
    for N in (9, 10):
        T = build_sector_hamiltonian(5, N, 1.3)
        np.testing.assert_allclose(T.offdiag, T.offdiag[::-1], rtol=1e-15)
        assert len(T.diag) == N + 1 and len(T.offdiag) == N


@pytest.mark.parametrize("p, N, gamma", [(3, 10, 1.0), (3, 10, 1.3), (3, 10, 1.2991), (5, 9, 0.7), (3, 7, 2.0)])
def test_matches_dense_oracle(p, N, gamma):
    dense = dense_spectrum_oracle(p, N, gamma, k=2)
    r = lowest_eigenvalues(build_sector_hamiltonian(p, N, gamma), 2)
    np.testing.assert_allclose(r.values, dense, atol=1e-10)
    assert sector_gap(p, N, gamma) == pytest.approx(dense[1] - dense[0], abs=1e-10)


def test_dense_oracle_two_by_two():
    g = 0.37
    np.testing.assert_allclose(dense_spectrum_oracle(3, 1, g), [-math.sqrt(1 + g * g), math.sqrt(1 + g * g)])


def test_sector_levels_contained_in_full_spectrum():
    full = dense_spectrum_oracle(3, 8, 0.7)
    sec = np.linalg.eigvalsh(build_sector_hamiltonian(3, 8, 0.7).to_dense())
    for e in sec:
        assert np.min(np.abs(full - e)) < 1e-10


def test_dense_oracle_size_guard():
    with pytest.raises(InvalidSizeError):
        dense_spectrum_oracle(3, 15, 1.0)


def test_sturm_count_extremes_and_midpoint():
    N, g = 10, 1.0
    T = build_sector_hamiltonian(3, N, g)
    for prec in ("standard", "extended"):
        assert sturm_count(T, -N * (1 + g) - 1e-9, prec) == 0
        assert sturm_count(T, N * (1 + g * math.sqrt(N)) + 1e-9, prec) == N + 1
    e = dense_spectrum_oracle(3, N, g, k=2)
    assert sturm_count(T, 0.5 * (e[0] + e[1])) == 1
    assert sturm_count(T, 0.5 * (e[0] + e[1]), "extended") == 1


@settings(max_examples=40, deadline=None)
@given(
    p=st.sampled_from([3, 5, 7]),
    N=st.integers(2, 40),
    gamma=st.floats(0.0, 3.0),
    xs=st.lists(st.floats(-200, 200), min_size=2, max_size=6),
)
def test_sturm_count_monotone(p, N, gamma, xs):
    T = build_sector_hamiltonian(p, N, gamma)
    xs = sorted(xs)
    for prec in ("standard", "extended"):
        counts = [sturm_count(T, x, prec) for x in xs]
        assert counts == sorted(counts)
        assert all(0 <= c <= N + 1 for c in counts)


@settings(max_examples=30, deadline=None)
@given(p=st.sampled_from([3, 5]), N=st.integers(2, 30), gamma=st.floats(0.05, 3.0))
def test_sign_convention_invariance(p, N, gamma):
    T = build_sector_hamiltonian(p, N, gamma)
    flipped = TridiagonalOperator.from_arrays(T.diag, -T.offdiag)
    a = lowest_eigenvalues(T, 3).values
    b = lowest_eigenvalues(flipped, 3).values
    np.testing.assert_allclose(a, b, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(p=st.sampled_from([3, 5, 9]), N=st.integers(2, 60), gamma=st.floats(0.1, 2.5))
def test_brackets_certify_sign_change(p, N, gamma):
    T = build_sector_hamiltonian(p, N, gamma)
    r = lowest_eigenvalues(T, 2)
    R = T.spectral_radius_bound()
    for i in range(2):
        assert sturm_count(T, r.lower[i]) <= i < sturm_count(T, r.upper[i])
        assert r.lower[i] <= r.values[i] <= r.upper[i]
        assert r.brackets[i] <= STANDARD_REL_TOL * R * 1.0000001


def test_extended_precision_past_double_floor():
    # finite-size avoided crossing of p=31, N=120, where the gap is ~1e-15 of a ~120 spectrum
    res = locate_min_gap(31, 120, "extended")
    T = build_sector_hamiltonian(31, 120, res.gamma_min, res.gamma_min_lo)
    std = lowest_eigenvalues(T, 2, "standard")
    assert not std.resolved
    with pytest.raises(GapBelowResolution):
        std.gap()
    ext = lowest_eigenvalues(T, 2, "extended")
    assert ext.resolved
    gap = ext.gap()
    assert 1e-18 < gap < 1e-12
    assert abs(math.log2(gap / 120) + 0.46 * 120) < 10
    R = T.spectral_radius_bound()
    assert np.all(ext.brackets <= EXTENDED_REL_TOL * R * 1.0000001)
    # certify with an independent 60-digit recurrence: one level below the
    # midpoint between the two, one more above each upper level
    with mpmath.workdps(60):
        l0 = mpmath.mpf(ext.values[0]) + mpmath.mpf(ext.values_lo[0])
        l1 = mpmath.mpf(ext.values[1]) + mpmath.mpf(ext.values_lo[1])
        half = (l1 - l0) / 2
        probes = [(l0 - half, 0), (l0 + half, 1), (l1 + half, 2)]
        for x, expected in probes:
            assert mp_sturm_count(31, 120, res.gamma_min, res.gamma_min_lo, x) == expected
        assert float(l1 - l0) == pytest.approx(gap, rel=1e-12)


def test_static_limit_bound():
    gamma = 0.8
    m, e = ferro_minimum(3, gamma)
    for N in (40, 80):
        lam0 = lowest_eigenvalues(build_sector_hamiltonian(3, N, gamma), 1).values[0]
        assert abs(lam0 / N - gs_energy_density(3, gamma, m)) <= 5.0 / N


def test_min_gap_decreases_exponentially():
    Ns = np.array([20, 40, 60, 80])
    y = [math.log2(locate_min_gap(3, int(N)).delta_min / N) for N in Ns]
    slope = np.polyfit(Ns, y, 1)[0]
    assert -0.2 < slope < -0.1
    assert np.all(np.diff(y) < 0)


@pytest.mark.parametrize("p, gamma", [(3, 0.3), (5, 1.1347), (INFINITY, 1.0)])
def test_lanczos_oracle_matches_dense_diagonalisation(p, gamma):
    full = dense_spectrum_oracle(p, 11, gamma)
    np.testing.assert_allclose(dense_spectrum_oracle(p, 11, gamma, k=3), full[:3], atol=1e-10)
