"""Mass-conservative finite-volume solver for drift diffusion on (0, 1)
with dynamical boundary masses.

The bulk density follows d(rho)/dt = d^2/dx^2 (x(1-x) rho) on the
truncated interval (delta, 1 - delta); point masses at the two ends
exchange with the bulk at rate eps through a' = rho(delta) - eps a and
b' = rho(1-delta) - eps b.  The discretization conserves the total
weighted mass exactly and is observed to dissipate the associated free
energy.  A Wright-Fisher chain ships as an independent oracle for the
fixation behavior.
"""

from .diagnostics import (
    DiagnosticsRecord,
    delayed_bc_residual,
    detect_monotonicity,
    discrete_energy,
    first_moment,
    total_mass,
)
from .equilibrium import (
    EquilibriumProfile,
    boundary_equilibrium_mass,
    equilibrium_coefficients,
    equilibrium_profile,
    predicted_fixation,
    sample_equilibrium,
)
from .experiments import (
    DESK_PROFILE,
    EXPERIMENTS,
    FULL_PROFILE,
    CriterionResult,
    ExperimentSpec,
    SuiteReport,
    evaluate_criteria,
    experiment_ic,
    run_experiment_named,
    run_suite,
    suite_runs,
)
from .grid import (
    Custom,
    Gaussian,
    GridSpec,
    InitialCondition,
    StateVector,
    Step,
    Uniform,
    WithBoundaryMass,
    build_grid,
    init_state,
    weight_vector,
    weighted_inner,
)
from .integrator import (
    ConvergenceStudy,
    CrankNicolsonStepper,
    DivergenceError,
    LinearSolveError,
    OrderEstimate,
    SolverConfig,
    Trajectory,
    cn_step,
    convergence_study,
    simulate,
    solve_tridiagonal,
    spatial_convergence,
    temporal_convergence,
)
from .operator import TridiagonalOperator, apply, assemble_operator, face_flux
from .wright_fisher import (
    WFModel,
    absorption_probabilities,
    evolve_distribution,
    fixation_fraction_mc,
    sample_path,
    transition_matrix,
    transition_row,
)

__version__ = "0.1.0"

__all__ = [
    "DiagnosticsRecord",
    "delayed_bc_residual",
    "detect_monotonicity",
    "discrete_energy",
    "first_moment",
    "total_mass",
    "EquilibriumProfile",
    "boundary_equilibrium_mass",
    "equilibrium_coefficients",
    "equilibrium_profile",
    "predicted_fixation",
    "sample_equilibrium",
    "DESK_PROFILE",
    "EXPERIMENTS",
    "FULL_PROFILE",
    "CriterionResult",
    "ExperimentSpec",
    "SuiteReport",
    "evaluate_criteria",
    "experiment_ic",
    "run_experiment_named",
    "run_suite",
    "suite_runs",
    "Custom",
    "Gaussian",
    "GridSpec",
    "InitialCondition",
    "StateVector",
    "Step",
    "Uniform",
    "WithBoundaryMass",
    "build_grid",
    "init_state",
    "weight_vector",
    "weighted_inner",
    "ConvergenceStudy",
    "CrankNicolsonStepper",
    "DivergenceError",
    "LinearSolveError",
    "OrderEstimate",
    "SolverConfig",
    "Trajectory",
    "cn_step",
    "convergence_study",
    "simulate",
    "solve_tridiagonal",
    "spatial_convergence",
    "temporal_convergence",
    "TridiagonalOperator",
    "apply",
    "assemble_operator",
    "face_flux",
    "WFModel",
    "absorption_probabilities",
    "evolve_distribution",
    "fixation_fraction_mc",
    "sample_path",
    "transition_matrix",
    "transition_row",
    "__version__",
]
