"""Driven-dissipative model of two quantum emitters radiatively coupled by
the normal modes of a photonic-crystal dimer, with steady-state and transient
entanglement quantified by the two-qubit negativity."""

from .exceptions import (
    ConfigError,
    DegenerateSteadyStateError,
    DomainError,
    IntegrationError,
    SingularSolveError,
    SolverError,
)
from .hilbert import (
    DEFAULT_POLICY,
    CompositeSpace,
    DensityMatrix,
    NumericPolicy,
    Operator,
    SubsystemSpec,
    boson,
    boson_annihilation,
    embed,
    hermitian_eigenvalues,
    partial_trace,
    qubit,
    qubit_lowering,
    solve_linear,
)
from .entanglement import bell_state, negativity, partial_transpose_first, qd_negativity
from .model import (
    HBAR_UEV_PS,
    CouplingMatrix,
    DriveParams,
    ModeParams,
    QDParams,
    SystemParams,
    build_effective_hamiltonian,
    build_lab_hamiltonian,
    coupling_from_field,
    identify_dark_state,
    preset_params,
    total_excitation_operator,
)
from .liouvillian import (
    Superoperator,
    VectorizedState,
    assemble_generator,
    build_liouvillian,
    commutator_superoperator,
    dephasing_dissipator,
    devectorize,
    dissipator,
    incoherent_pump_dissipator,
    vectorize,
)
from .solvers import (
    ConvergenceReport,
    Schedule,
    Trajectory,
    convergence_scan,
    evolve,
    steady_state,
)
from .experiments import (
    QD_GAMMA_FAMILY,
    SweepAxis,
    SweepResult,
    SweepSpec,
    dynamics_run,
    optimal_transfer_time,
    oscillation_period,
    run_sweep,
    stark_switch_protocol,
    sweep_dephasing,
    sweep_detuning,
    sweep_phase_detuning,
    sweep_splitting,
)

__version__ = "0.1.0"
