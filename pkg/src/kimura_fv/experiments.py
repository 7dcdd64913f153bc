"""Named validation experiments and the acceptance checks run over them.

Four reference experiments (uniform, step, gaussian, heavy_boundary) plus
epsilon/delta sweeps feed eleven numbered checks: conservation of mass and
first moment, boundary symmetry, energy decay, the fixation-mass and
equilibrium-profile limits, epsilon scaling of the residual bulk,
non-monotone boundary growth under strong exchange, the time-stepping
order, the Wright-Fisher oracle, and the delayed-boundary identity.

run_suite executes everything at a given resolution profile and returns a
machine-readable report; the test suite evaluates the same checks through
evaluate_criteria so the CLI and CI agree by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .diagnostics import delayed_bc_residual, detect_monotonicity
from .equilibrium import (
    boundary_equilibrium_mass,
    equilibrium_profile,
    predicted_fixation,
    sample_equilibrium,
)
from .grid import (
    Gaussian,
    GridSpec,
    InitialCondition,
    Step,
    Uniform,
    WithBoundaryMass,
    build_grid,
)
from .integrator import SolverConfig, Trajectory, simulate, temporal_convergence
from .wright_fisher import (
    WFModel,
    absorption_probabilities,
    evolve_distribution,
    transition_matrix,
)

__all__ = [
    "ExperimentSpec",
    "EXPERIMENTS",
    "experiment_ic",
    "run_experiment_named",
    "CriterionResult",
    "SuiteReport",
    "DESK_PROFILE",
    "FULL_PROFILE",
    "suite_runs",
    "evaluate_criteria",
    "run_suite",
]

# resolution profiles: (n_cells, tau)
DESK_PROFILE = (2000, 1e-3)
FULL_PROFILE = (10_000, 1e-4)


def _uniform_ic(delta: float) -> InitialCondition:
    return Uniform()


def _step_ic(delta: float) -> InitialCondition:
    scale = 1.0 / (1.0 - 2.0 * delta)
    return Step(left_value=0.5 * scale, right_value=1.5 * scale, split_point=0.5)


def _gaussian_ic(delta: float) -> InitialCondition:
    return Gaussian(x0=0.4, sigma=0.1)


def _heavy_boundary_ic(delta: float) -> InitialCondition:
    return WithBoundaryMass(bulk_value=0.02 / (1.0 - 2.0 * delta), a0=0.49, b0=0.49)


@dataclass(frozen=True)
class ExperimentSpec:
    """A named experiment: domain/exchange parameters, IC builder, horizon.

    tau_max caps the step size regardless of the resolution profile.  The
    heavy_boundary run needs it because its boundary dip happens within the
    first hundredth of a time unit.  The step run needs it because the
    trapezoidal stepper damps the stiffest modes of jump data at a rate of
    about 4 h^2 / tau^2 per time unit while the bulk decays at rate 2, so
    with tau much beyond the cell width the ringing outlives the positive
    background and the iterates dip negative.
    """

    name: str
    delta: float
    epsilon: float
    make_ic: Callable[[float], InitialCondition]
    t_final: float
    tau_max: float = np.inf

    def ic(self) -> InitialCondition:
        return self.make_ic(self.delta)


EXPERIMENTS: dict[str, ExperimentSpec] = {
    spec.name: spec
    for spec in (
        ExperimentSpec("uniform", 1e-3, 1e-3, _uniform_ic, 10.0),
        ExperimentSpec("step", 1e-3, 1e-3, _step_ic, 10.0, tau_max=2.5e-4),
        ExperimentSpec("gaussian", 1e-4, 1e-4, _gaussian_ic, 2.0),
        ExperimentSpec("heavy_boundary", 1e-4, 1.0, _heavy_boundary_ic, 0.1, tau_max=1e-4),
    )
}


def experiment_ic(name: str) -> InitialCondition:
    """Initial condition of a named experiment."""
    return EXPERIMENTS[name].ic()


def run_experiment_named(
    name: str,
    n_cells: int,
    tau: float,
    output_every: int = 1,
    snapshot_times: tuple[float, ...] = (),
) -> Trajectory:
    """Run one named experiment at the given resolution."""
    spec = EXPERIMENTS[name]
    grid = build_grid(spec.delta, n_cells)
    tau_eff = min(tau, spec.tau_max)
    config = SolverConfig(tau=tau_eff, t_final=spec.t_final, output_every=output_every)
    return simulate(grid, spec.epsilon, spec.ic(), config, snapshot_times)


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    measured: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "number": self.number,
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "measured": self.measured,
        }


@dataclass(frozen=True)
class SuiteReport:
    n_cells: int
    tau: float
    criteria: list[CriterionResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)

    def to_dict(self) -> dict:
        return {
            "profile": {"n_cells": self.n_cells, "tau": self.tau},
            "passed": self.passed,
            "criteria": [c.to_dict() for c in self.criteria],
        }

    def summary_lines(self) -> list[str]:
        lines = []
        for c in self.criteria:
            verdict = "PASS" if c.passed else "FAIL"
            lines.append(f"[{verdict}] {c.number:2d} {c.name}: {c.detail}")
        return lines


def suite_runs(n_cells: int, tau: float, log: Callable[[str], None] | None = None) -> dict[str, Trajectory]:
    """Execute every simulation the checks need, keyed by run name.

    All runs record diagnostics at every step so that per-step checks
    (mass, energy monotonicity) see the full history, not a subsample.
    """

    def note(msg: str) -> None:
        if log is not None:
            log(msg)

    runs: dict[str, Trajectory] = {}
    for name in ("uniform", "step", "gaussian", "heavy_boundary"):
        note(f"running experiment {name} (N = {n_cells})")
        runs[name] = run_experiment_named(name, n_cells, tau)

    note("running uniform to t = 50 (equilibrium probe)")
    grid = build_grid(1e-3, n_cells)
    runs["uniform_long"] = simulate(
        grid, 1e-3, Uniform(), SolverConfig(tau=tau, t_final=50.0, output_every=1)
    )
    note(f"running uniform to t = 50 at doubled resolution (N = {2 * n_cells})")
    grid_fine = build_grid(1e-3, 2 * n_cells)
    runs["uniform_long_fine"] = simulate(
        grid_fine, 1e-3, Uniform(), SolverConfig(tau=tau, t_final=50.0, output_every=1)
    )

    for eps in (1e-2, 1e-4):
        note(f"running epsilon sweep point eps = {eps}")
        runs[f"eps_{eps:g}"] = simulate(
            grid, eps, Uniform(), SolverConfig(tau=tau, t_final=10.0, output_every=1)
        )
    for delta in (1e-2, 1e-4):
        note(f"running delta sweep point delta = {delta}")
        grid_d = build_grid(delta, n_cells)
        runs[f"delta_{delta:g}"] = simulate(
            grid_d, 1e-3, Uniform(), SolverConfig(tau=tau, t_final=10.0, output_every=1)
        )
    return runs


def _criterion(number: int, name: str, passed: bool, detail: str, **measured: float) -> CriterionResult:
    return CriterionResult(
        number=number,
        name=name,
        passed=bool(passed),
        detail=detail,
        measured={k: float(v) for k, v in measured.items()},
    )


def _mass_conservation(runs: dict[str, Trajectory]) -> CriterionResult:
    worst = 0.0
    worst_run = ""
    for name, tr in runs.items():
        drift = float(np.abs(tr.series("mass") - 1.0).max())
        if drift > worst:
            worst, worst_run = drift, name
    tol = 1e-11
    return _criterion(
        1,
        "mass_conservation",
        worst <= tol,
        f"max |mass - 1| = {worst:.3e} (run {worst_run}), tolerance {tol:.0e}",
        max_drift=worst,
    )


def _boundary_symmetry(runs: dict[str, Trajectory]) -> CriterionResult:
    tr = runs["uniform"]
    gap = float(np.abs(tr.series("a") - tr.series("b")).max())
    tol = 1e-11
    return _criterion(
        2,
        "boundary_symmetry",
        gap <= tol,
        f"max |a - b| = {gap:.3e} on the uniform run, tolerance {tol:.0e}",
        max_gap=gap,
    )


def _first_moment(runs: dict[str, Trajectory]) -> CriterionResult:
    uniform_dev = float(np.abs(runs["uniform"].series("first_moment") - 0.5).max())
    m1 = runs["gaussian"].series("first_moment")
    gauss_drift = float(np.abs(m1 - m1[0]).max() / abs(m1[0]))
    tol_u, tol_g = 1e-10, 1e-2
    passed = uniform_dev <= tol_u and gauss_drift <= tol_g
    return _criterion(
        3,
        "first_moment",
        passed,
        f"uniform max |M1 - 1/2| = {uniform_dev:.3e} (tol {tol_u:.0e}); "
        f"gaussian relative drift = {gauss_drift:.3e} (tol {tol_g:.0e})",
        uniform_deviation=uniform_dev,
        gaussian_relative_drift=gauss_drift,
    )


def _energy_decay(runs: dict[str, Trajectory]) -> CriterionResult:
    tol = 1e-10
    worst = -np.inf
    worst_run = ""
    for name in ("uniform", "step", "gaussian"):
        series = runs[name].series("energy")
        if not np.all(np.isfinite(series)):
            # energy tracking lost a snapshot (negative entries at this
            # resolution); monotonicity cannot be certified
            return _criterion(
                4,
                "energy_decay",
                False,
                f"energy unavailable on run {name} (state went negative); "
                "cannot certify monotone decay at this resolution",
                max_energy_rise=np.nan,
            )
        rise = float(np.diff(series).max())
        if rise > worst:
            worst, worst_run = rise, name
    return _criterion(
        4,
        "energy_decay",
        worst <= tol,
        f"max per-step energy increase = {worst:.3e} (run {worst_run}), tolerance {tol:.0e}",
        max_energy_rise=worst,
    )


def _fixation_mass(runs: dict[str, Trajectory]) -> CriterionResult:
    tr = runs["uniform_long"]
    final = tr.records[-1]
    total = final.a + final.b
    target = boundary_equilibrium_mass(1e-3, 1e-3)
    dev_formula = abs(total - target)
    dev_one = abs(total - 1.0)
    passed = dev_formula <= 1e-3 and dev_one <= 2e-3
    return _criterion(
        5,
        "fixation_mass",
        passed,
        f"a + b = {total:.10f} at t = 50; |vs closed form {target:.7f}| = {dev_formula:.2e} "
        f"(tol 1e-3), |vs 1| = {dev_one:.2e} (tol 2e-3)",
        boundary_total=total,
        closed_form=target,
        deviation_formula=dev_formula,
        deviation_one=dev_one,
    )


def _profile_deviation(tr: Trajectory) -> float:
    """Relative sup-norm gap between the final bulk and the sampled profile."""
    final = tr.final_state
    prof = equilibrium_profile(final.a, final.b, tr.epsilon, tr.grid.delta)
    target = sample_equilibrium(prof, tr.grid).rho
    return float(np.abs(final.rho - target).max() / np.abs(target).max())


def _equilibrium_profile(runs: dict[str, Trajectory]) -> CriterionResult:
    dev = _profile_deviation(runs["uniform_long"])
    dev_fine = _profile_deviation(runs["uniform_long_fine"])
    tol = 2e-2
    noise_floor = 1e-8
    # Doubling the resolution should not let the deviation grow: either the
    # coarse-to-fine ratio shows a clear drop, or both deviations sit below
    # a floor where the profile already agrees to round-off and ratios are
    # meaningless.
    decreasing = dev_fine <= dev / 2.5 or (dev <= noise_floor and dev_fine <= noise_floor)
    passed = dev <= tol and decreasing
    return _criterion(
        6,
        "equilibrium_profile",
        passed,
        f"relative sup deviation = {dev:.3e} at base resolution (tol {tol:.0e}), "
        f"{dev_fine:.3e} at doubled resolution",
        deviation=dev,
        deviation_fine=dev_fine,
    )


def _epsilon_scaling(runs: dict[str, Trajectory]) -> CriterionResult:
    eps = np.array([1e-2, 1e-3, 1e-4])
    l2 = np.array(
        [
            runs["eps_0.01"].records[-1].l2_bulk,
            runs["uniform"].records[-1].l2_bulk,
            runs["eps_0.0001"].records[-1].l2_bulk,
        ]
    )
    slope = float(np.polyfit(np.log(eps), np.log(l2), 1)[0])
    passed = 0.9 <= slope <= 1.1
    return _criterion(
        7,
        "epsilon_scaling",
        passed,
        f"log-log slope of final bulk L2 vs epsilon = {slope:.4f}, band [0.9, 1.1]",
        slope=slope,
    )


def _nonmonotone_boundary(runs: dict[str, Trajectory]) -> CriterionResult:
    tr = runs["heavy_boundary"]
    mask = (tr.times > 0.0) & (tr.times <= 0.1 + 1e-12)
    times = tr.times[mask]
    a = tr.series("a")[mask]
    extrema = detect_monotonicity(times, a)
    minima = [t for t, kind in extrema if kind == "min"]
    if extrema:
        t_last = extrema[-1][0]
        after = a[times >= t_last]
        floor = 1e-12 * float(np.abs(a).max())
        nondecreasing = bool(np.all(np.diff(after) >= -floor))
    else:
        nondecreasing = False
    passed = len(minima) >= 1 and nondecreasing
    detail = (
        f"{len(minima)} interior minimum(s) on (0, 0.1]"
        + (f", first at t = {minima[0]:.4f}" if minima else "")
        + f"; nondecreasing after last extremum: {nondecreasing}"
    )
    return _criterion(
        8,
        "nonmonotone_boundary_mass",
        passed,
        detail,
        n_minima=len(minima),
        t_first_min=minima[0] if minima else np.nan,
    )


def _temporal_order(n_cells: int) -> CriterionResult:
    grid = build_grid(1e-3, n_cells)
    estimate = temporal_convergence(
        grid,
        1e-3,
        Gaussian(x0=0.4, sigma=0.1),
        taus=(4e-3, 2e-3, 1e-3),
        t_probe=1.0,
        tau_ref=1.25e-4,
    )
    passed = 1.7 <= estimate.order <= 2.2
    return _criterion(
        9,
        "temporal_order",
        passed,
        f"observed order = {estimate.order:.3f} "
        f"(pairwise {np.round(estimate.pairwise_orders, 3).tolist()}), band [1.7, 2.2]",
        order=estimate.order,
    )


def _wright_fisher_oracle(n_cells: int) -> CriterionResult:
    model = WFModel(two_n=20)
    matrix = transition_matrix(model)
    row_defect = float(np.abs(matrix.sum(axis=1) - 1.0).max())

    states = np.arange(model.n_states) / model.two_n
    dist0 = np.zeros(model.n_states)
    dist0[8] = 1.0
    evolved = evolve_distribution(model, dist0, 10_000)
    mean_drift = abs(float(states @ evolved) - float(states @ dist0))

    absorb = absorption_probabilities(model)
    absorb_defect = float(np.abs(absorb - states).max())

    # cross-validation against the solver's fixation prediction: start the
    # chain from the same bell-shaped profile sampled on its own state grid
    grid = build_grid(1e-4, n_cells)
    ic = Gaussian(x0=0.4, sigma=0.1)
    _, b_pred = predicted_fixation(ic, grid)
    bell = np.exp(-0.5 * ((states - 0.4) / 0.1) ** 2)
    bell /= bell.sum()
    chain_fix = float(evolve_distribution(model, bell, 10_000)[-1])
    cross_gap = abs(b_pred - chain_fix)

    passed = (
        row_defect <= 1e-14
        and mean_drift <= 1e-12
        and absorb_defect <= 1e-12
        and cross_gap <= 1e-2
    )
    return _criterion(
        10,
        "wright_fisher_oracle",
        passed,
        f"row-sum defect {row_defect:.1e} (tol 1e-14); mean drift over 1e4 steps "
        f"{mean_drift:.1e} (tol 1e-12); absorption vs i/2N {absorb_defect:.1e} (tol 1e-12); "
        f"PDE vs chain fixation gap {cross_gap:.2e} (tol 1e-2)",
        row_defect=row_defect,
        mean_drift=mean_drift,
        absorption_defect=absorb_defect,
        cross_gap=cross_gap,
    )


def _delayed_boundary(runs: dict[str, Trajectory]) -> CriterionResult:
    tr = runs["uniform"]
    residual = delayed_bc_residual(
        tr.times, tr.series("rho_at_delta"), tr.series("a"), tr.epsilon
    )
    tol = 1e-5
    return _criterion(
        11,
        "delayed_boundary_residual",
        residual <= tol,
        f"max defect of the integrated boundary law = {residual:.3e}, tolerance {tol:.0e}",
        residual=residual,
    )


def evaluate_criteria(
    runs: dict[str, Trajectory], n_cells: int, tau: float
) -> list[CriterionResult]:
    """Evaluate all eleven checks against a completed set of suite runs."""
    return [
        _mass_conservation(runs),
        _boundary_symmetry(runs),
        _first_moment(runs),
        _energy_decay(runs),
        _fixation_mass(runs),
        _equilibrium_profile(runs),
        _epsilon_scaling(runs),
        _nonmonotone_boundary(runs),
        _temporal_order(n_cells),
        _wright_fisher_oracle(n_cells),
        _delayed_boundary(runs),
    ]


def run_suite(
    n_cells: int = DESK_PROFILE[0],
    tau: float = DESK_PROFILE[1],
    log: Callable[[str], None] | None = None,
) -> SuiteReport:
    """Run every experiment and evaluate the full set of checks."""
    runs = suite_runs(n_cells, tau, log)
    criteria = evaluate_criteria(runs, n_cells, tau)
    return SuiteReport(n_cells=n_cells, tau=tau, criteria=criteria)
