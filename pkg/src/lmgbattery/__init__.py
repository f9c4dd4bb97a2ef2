"""Collective-spin quantum battery simulations: exact spectra, quench and
bath charging protocols, work statistics, and subsystem ergotropy."""

from .operators import (
    DickeBasis,
    LmgParams,
    brute_force_hamiltonian,
    build_jminus,
    build_jplus,
    build_jx,
    build_jy,
    build_jz,
    build_lmg_hamiltonian,
    dropped_constant,
    isotropic_energy,
    isotropic_gap,
    isotropic_gap_closings,
)
from .spectral import (
    NumericsError,
    SpectralDecomposition,
    diagonalize,
    evolve,
    evolve_grid,
    expectation,
    ground_state,
)
from .quench import (
    QuenchResult,
    QuenchSpec,
    SuddenQuench,
    WorkDistribution,
    default_time_grid,
    phase_boundary,
)
from .subsystem import (
    SubsystemDynamics,
    ergotropy,
    passive_state,
    reduce_symmetric_state,
    split_amplitudes,
    subsystem_dynamics,
    subsystem_hamiltonian,
    subsystem_work,
)
from .bath import (
    BathSpec,
    ChargingRun,
    annihilation_operator,
    build_composite_hamiltonian,
    check_headroom,
    coupling_sweep,
    default_frequency,
    energy_occupations,
    number_operator,
    reduced_spin_state,
    run_bath_charging,
)

__version__ = "0.1.0"

__all__ = [
    "LmgParams",
    "DickeBasis",
    "build_jz",
    "build_jplus",
    "build_jminus",
    "build_jx",
    "build_jy",
    "build_lmg_hamiltonian",
    "dropped_constant",
    "brute_force_hamiltonian",
    "isotropic_energy",
    "isotropic_gap",
    "isotropic_gap_closings",
    "NumericsError",
    "SpectralDecomposition",
    "diagonalize",
    "ground_state",
    "evolve",
    "evolve_grid",
    "expectation",
    "QuenchSpec",
    "WorkDistribution",
    "QuenchResult",
    "SuddenQuench",
    "default_time_grid",
    "phase_boundary",
    "split_amplitudes",
    "reduce_symmetric_state",
    "subsystem_hamiltonian",
    "passive_state",
    "ergotropy",
    "subsystem_work",
    "SubsystemDynamics",
    "subsystem_dynamics",
    "BathSpec",
    "ChargingRun",
    "default_frequency",
    "annihilation_operator",
    "number_operator",
    "check_headroom",
    "build_composite_hamiltonian",
    "reduced_spin_state",
    "energy_occupations",
    "run_bath_charging",
    "coupling_sweep",
    "__version__",
]
