import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annealgap import (
    ZERO_T,
    Branch,
    NoTransitionError,
    RegimeError,
    build_sector_hamiltonian,
    classical_pinf_free_energy,
    equilibrium,
    free_energy,
    gs_energy_density,
    low_T_energy,
    magnetization_solutions,
    phase_boundary,
    pinf_transition_line,
)
from annealgap.errors import InvalidTemperatureError
from annealgap.statics import excitation_gap, log2cosh


def naive_free_energy(p, beta, gamma, m):
    r = math.sqrt(gamma**2 + p**2 * m ** (2 * p - 2))
    return (p - 1) * m**p - math.log(2 * math.cosh(beta * r)) / beta


def test_free_energy_examples():
    assert free_energy(3, 1.0, 1.0, 0.0) == pytest.approx(-math.log(2 * math.cosh(1.0)), abs=1e-15)
    assert free_energy(3, 1e4, 0.0, 1.0) == pytest.approx(-1.0, abs=1e-4)
    assert free_energy(3, ZERO_T, 0.5, 0.3) == gs_energy_density(3, 0.5, 0.3)
    ms = np.linspace(0, 1, 5)
    np.testing.assert_allclose(free_energy(5, 2.0, 0.7, ms), [free_energy(5, 2.0, 0.7, m) for m in ms])


def test_log2cosh_survives_large_arguments():
    assert log2cosh(1e4) == 1e4
    assert log2cosh(-800.0) == 800.0
    assert log2cosh(0.0) == pytest.approx(math.log(2.0))


@settings(max_examples=80, deadline=None)
@given(p=st.sampled_from([3, 5, 7]), beta=st.floats(0.05, 50.0), gamma=st.floats(0.0, 3.0), m=st.floats(0.0, 1.0))
def test_stable_form_equals_naive(p, beta, gamma, m):
    assert free_energy(p, beta, gamma, m) == pytest.approx(naive_free_energy(p, beta, gamma, m), rel=1e-12, abs=1e-13)


def test_temperature_validation():
    with pytest.raises(InvalidTemperatureError):
        free_energy(3, -1.0, 1.0, 0.0)
    with pytest.raises(InvalidTemperatureError):
        magnetization_solutions(3, 0.0, 1.0)


def test_paramagnet_only_at_strong_field():
    sols = magnetization_solutions(3, 1e3, 3.0)
    assert len(sols) == 1
    assert sols[0].m == 0.0 and sols[0].branch is Branch.QPARA


def test_ferro_root_at_weak_field():
    sols = magnetization_solutions(3, 1e3, 0.5)
    ferro = [s for s in sols if s.branch is Branch.FERRO]
    assert len(ferro) == 1
    assert ferro[0].m > 0.95


@pytest.mark.parametrize("p, beta, gamma", [(3, 1e3, 0.5), (3, 5.0, 1.0), (5, 20.0, 1.0), (3, 1e3, 1.29)])
def test_roots_are_stationary_minima(p, beta, gamma):
    h = 1e-6
    for s in magnetization_solutions(p, beta, gamma):
        if s.branch is Branch.QPARA:
            continue
        df = (free_energy(p, beta, gamma, s.m + h) - free_energy(p, beta, gamma, s.m - h)) / (2 * h)
        assert abs(df) < 1e-6
        curv = free_energy(p, beta, gamma, s.m + 1e-3) + free_energy(p, beta, gamma, s.m - 1e-3) - 2 * s.f
        assert curv > 0


def test_equilibrium_switches_across_boundary():
    pb = phase_boundary(3, 1e3)
    below = equilibrium(3, 1e3, pb.gamma_star - 1e-3)
    above = equilibrium(3, 1e3, pb.gamma_star + 1e-3)
    assert below.branch is Branch.FERRO and below.m > 0.8
    assert above.branch is Branch.QPARA
    assert abs(below.f - above.f) < 5e-3
    # the jump in m is first order
    assert pb.m_jump == pytest.approx(0.866, abs=1e-3)


def test_free_energy_continuous_at_boundary():
    pb = phase_boundary(5, 50.0)
    g = pb.gamma_star
    f_lo = equilibrium(5, 50.0, g - 1e-7).f
    f_hi = equilibrium(5, 50.0, g + 1e-7).f
    assert abs(f_lo - f_hi) < 1e-6


def test_low_temperature_free_energy_approaches_ground_state():
    for gamma, m in ((0.5, 0.99), (1.5, 0.0)):
        assert free_energy(3, 1e3, gamma, m) == pytest.approx(gs_energy_density(3, gamma, m), abs=1e-12)


def test_phase_boundary_values():
    assert phase_boundary(3, 1e3).gamma_star == pytest.approx(1.2990381, abs=1e-6)
    assert phase_boundary(31, 1e3).gamma_star == pytest.approx(1.0168, abs=1e-4)
    assert phase_boundary(3, 1.0).gamma_star < phase_boundary(3, 1e3).gamma_star
    for beta in (0.3, 0.5):
        with pytest.raises(NoTransitionError):
            phase_boundary(3, beta)


def test_low_T_regime_guard():
    with pytest.raises(RegimeError):
        low_T_energy(3, 1.0, 1.0, 0.0)
    assert low_T_energy(3, ZERO_T, 1.0, 0.0) == -1.0


def sector_thermal_energy(p, N, beta, gamma):
    # Boltzmann-weighted energy per spin over the full symmetric sector
    e = np.linalg.eigvalsh(build_sector_hamiltonian(p, N, gamma).to_dense())
    w = np.exp(-beta * (e - e[0]))
    return float(np.sum(w * e) / np.sum(w)) / N


def test_low_T_energy_against_sector_thermodynamics():
    beta, gamma = 6.0, 1.0
    eq = equilibrium(3, ZERO_T, gamma)
    approx = low_T_energy(3, beta, gamma, eq.m)
    assert abs(approx - sector_thermal_energy(3, 12, beta, gamma)) < 0.05


def test_excitation_gap_jumps_at_boundary():
    pb = phase_boundary(3, 1e3)
    lo = equilibrium(3, 1e3, pb.gamma_star - 1e-3)
    hi = equilibrium(3, 1e3, pb.gamma_star + 1e-3)
    d_lo = excitation_gap(3, pb.gamma_star - 1e-3, lo.m)
    d_hi = excitation_gap(3, pb.gamma_star + 1e-3, hi.m)
    assert d_hi == pytest.approx(2 * (pb.gamma_star + 1e-3), rel=1e-12)
    assert d_lo - d_hi > 0.5


def test_pinf_line_against_arccosh():
    for beta in (1.0, 2.0, 5.0):
        x = math.exp(beta) / 2
        assert pinf_transition_line(beta) == pytest.approx(math.log(x + math.sqrt(x * x - 1)) / beta, rel=1e-13)
    assert pinf_transition_line(1.0) == pytest.approx(0.82400, abs=1e-5)


def test_pinf_line_limits():
    assert pinf_transition_line(math.log(2.0)) == pytest.approx(0.0, abs=1e-7)
    assert pinf_transition_line(1e6) == pytest.approx(1.0, abs=1e-6)
    assert pinf_transition_line(ZERO_T) == 1.0
    with pytest.raises(NoTransitionError):
        pinf_transition_line(0.5)


def test_classical_pinf_free_energy():
    assert classical_pinf_free_energy(1.0) == -1.0
    assert classical_pinf_free_energy(0.5) == pytest.approx(-2 * math.log(2.0))
    assert classical_pinf_free_energy(math.log(2.0)) == pytest.approx(-1.0)
    assert classical_pinf_free_energy(ZERO_T) == -1.0
