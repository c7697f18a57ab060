"""Spectra, gaps and tunnelling exponents of the transverse-field p-spin ferromagnet."""

__version__ = "0.1.0"

from .analysis import (
    GapCurve,
    GapPoint,
    MinGapResult,
    ScalingFit,
    Table1Row,
    annealing_time_estimate,
    gamma_scan,
    locate_min_gap,
    min_gap,
    min_gap_sweep,
    scaling_fit,
    table1_pipeline,
)
from .errors import (
    AnnealGapError,
    BoundaryMinimumError,
    ConvergenceError,
    DegeneracyError,
    DiscretizationError,
    FitError,
    GapBelowResolution,
    InvalidModelError,
    InvalidSizeError,
    NegativeFieldError,
    NoTransitionError,
    PoleProximityError,
    RegimeError,
    UnsupportedOrderError,
)
from .grover import (
    DispersionProblem,
    LevelPair,
    dispersion_lhs,
    dispersion_problem,
    grover_min_gap,
    lowest_two_levels,
    min_gap_asymptotic,
    perturbative_gs_energy,
)
from .instanton import (
    InstantonPath,
    InstantonResult,
    constant_path,
    instanton_cost,
    path_free_energy,
    sharp_wall_alpha,
    tanh_instanton_alpha,
    two_kink_path,
)
from .model import (
    INFINITY,
    ZERO_T,
    CriticalPoint,
    ModelSpec,
    asymptotic_critical_point,
    gs_energy_density,
    validate_spec,
    zero_T_critical_point,
)
from .sector import (
    EigenResult,
    TridiagonalOperator,
    build_sector_hamiltonian,
    dense_spectrum_oracle,
    lowest_eigenvalues,
    sector_gap,
    sturm_count,
)
from .statics import (
    Branch,
    FreeEnergyPoint,
    PhasePoint,
    classical_pinf_free_energy,
    equilibrium,
    free_energy,
    low_T_energy,
    magnetization_solutions,
    phase_boundary,
    pinf_transition_line,
)
