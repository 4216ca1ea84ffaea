"""Phase dynamics of driven, damped two-level systems.

Subpackages cover the physical model (analytic envelopes and phases), the
closed-form dressed-state phases and adiabaticity diagnostics, brute-force
Schrodinger propagation used as the ground-truth oracle, phase-locked
pulse-pair interferometry, and the hydrodynamic (polar) decomposition of 1-D
wavefunctions.
"""

from .model import (
    DrivingField,
    EnvelopeSpec,
    InitialPhases,
    PhaseSpec,
    TwoLevelSystem,
    complex_detuning,
    instantaneous_field,
    optical_phase,
    rabi_frequency,
)
from .dressed import (
    AdiabaticityReport,
    DressedPhaseSeries,
    DressedPhaseSet,
    EffectiveFrequencies,
    adiabatic_report,
    assemble_bare_state,
    born_fock_value,
    dressed_amplitudes,
    dressed_phases,
    effective_excited_frequency,
    generalized_rabi,
    level_shifts,
    usual_adiabatic_value,
)
from .propagator import (
    IntegratorConfig,
    TwoLevelState,
    TwoLevelTrajectory,
    compare_trajectories,
    full_field_propagate,
    rk4_propagate,
    rwa_propagate,
)
from .interferometry import (
    FringeRecord,
    PulsePairConfig,
    phase_scan,
    pulse_pair_population,
    visibility,
)
from .hydro import (
    GridWavefunction,
    PolarFields,
    PotentialSpec,
    continuity_residual,
    hj_residual,
    momentum_field,
    polar_decompose,
    quantum_potential,
    split_step_solve,
)

__version__ = "0.1.0"
