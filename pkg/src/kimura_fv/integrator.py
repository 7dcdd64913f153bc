"""Crank-Nicolson time integration via direct tridiagonal solves.

Each step solves (I - tau/2 L) p^{n+1} = (I + tau/2 L) p^n.  Since the
operator is constant in time, the left-hand matrix is factored once per
(operator, tau) pair and the factorization is reused for every step; this
is what makes long runs cheap.  The standalone solve_tridiagonal performs
a Thomas elimination and falls back to a partial-pivoting banded solve
when the no-pivot sweep meets a pivot below a relative floor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import get_lapack_funcs, solve_banded

from .diagnostics import DiagnosticsRecord, discrete_energy, first_moment
from .grid import GridSpec, InitialCondition, StateVector, init_state, weight_vector
from .operator import TridiagonalOperator, assemble_operator

__all__ = [
    "LinearSolveError",
    "DivergenceError",
    "SolverConfig",
    "Trajectory",
    "OrderEstimate",
    "ConvergenceStudy",
    "solve_tridiagonal",
    "CrankNicolsonStepper",
    "cn_step",
    "simulate",
    "temporal_convergence",
    "spatial_convergence",
    "convergence_study",
]

# tolerance below which negative round-off entries are treated as zero when
# tracking the free energy along a trajectory
_ENERGY_NEG_TOL = 1e-12


class LinearSolveError(RuntimeError):
    """A tridiagonal system could not be solved reliably."""


class DivergenceError(RuntimeError):
    """The time stepper produced a non-finite state."""


@dataclass(frozen=True)
class SolverConfig:
    """Time-stepping parameters.

    t_final must be an integer multiple of tau (to 1e-8 relative); the run
    takes round(t_final / tau) uniform steps.  Diagnostics are recorded at
    t = 0, every output_every-th step, and at the final step.
    """

    tau: float
    t_final: float
    output_every: int = 1

    def __post_init__(self) -> None:
        if not self.tau > 0.0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.t_final < self.tau:
            raise ValueError(f"t_final = {self.t_final} is smaller than tau = {self.tau}")
        if self.output_every < 1:
            raise ValueError(f"output_every must be >= 1, got {self.output_every}")
        steps = self.t_final / self.tau
        if abs(steps - round(steps)) > 1e-8 * max(1.0, steps):
            raise ValueError(
                f"t_final = {self.t_final} is not an integer multiple of tau = {self.tau}"
            )

    @property
    def n_steps(self) -> int:
        return round(self.t_final / self.tau)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Result of a simulation run."""

    times: np.ndarray
    records: list[DiagnosticsRecord]
    snapshots: list[tuple[float, StateVector]]
    final_state: StateVector
    grid: GridSpec
    epsilon: float

    def series(self, name: str) -> np.ndarray:
        """Column of the diagnostics table, e.g. series("mass").

        Energy entries that are unavailable (epsilon = 0, or a snapshot
        with negative entries beyond round-off) come back as NaN.
        """
        values = [getattr(r, name) for r in self.records]
        return np.array([np.nan if v is None else v for v in values], dtype=float)


def solve_tridiagonal(
    lower: np.ndarray,
    main: np.ndarray,
    upper: np.ndarray,
    rhs: np.ndarray,
    pivot_floor: float = 1e-12,
) -> np.ndarray:
    """Solve the tridiagonal system with diagonals (lower, main, upper).

    A plain Thomas elimination is used as long as every pivot stays above
    pivot_floor times the largest diagonal entry in magnitude; otherwise
    the sweep is abandoned and a partial-pivoting banded solve is used.
    Singular systems raise LinearSolveError.
    """
    lower = np.asarray(lower, dtype=float)
    main = np.asarray(main, dtype=float)
    upper = np.asarray(upper, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    n = main.size
    if lower.size != n - 1 or upper.size != n - 1 or rhs.size != n:
        raise ValueError(
            "inconsistent sizes: main has "
            f"{n}, lower {lower.size}, upper {upper.size}, rhs {rhs.size}"
        )
    if n == 0:
        return rhs.copy()

    scale = max(
        float(np.abs(main).max()),
        float(np.abs(lower).max()) if n > 1 else 0.0,
        float(np.abs(upper).max()) if n > 1 else 0.0,
    )
    if scale == 0.0:
        raise LinearSolveError("zero matrix")
    floor = pivot_floor * scale

    cp = np.empty(n - 1) if n > 1 else np.empty(0)
    dp = np.empty(n)
    den = main[0]
    ok = abs(den) > floor
    if ok:
        dp[0] = rhs[0] / den
        for i in range(1, n):
            cp[i - 1] = upper[i - 1] / den
            den = main[i] - lower[i - 1] * cp[i - 1]
            if abs(den) <= floor:
                ok = False
                break
            dp[i] = (rhs[i] - lower[i - 1] * dp[i - 1]) / den
    if ok:
        x = dp
        for i in range(n - 2, -1, -1):
            x[i] -= cp[i] * x[i + 1]
        return x

    # pivoting fallback: same system in LAPACK banded storage
    ab = np.zeros((3, n))
    ab[0, 1:] = upper
    ab[1, :] = main
    ab[2, :-1] = lower
    try:
        return solve_banded((1, 1), ab, rhs)
    except np.linalg.LinAlgError as exc:
        raise LinearSolveError(f"tridiagonal system is singular: {exc}") from exc


class CrankNicolsonStepper:
    """Prefactored Crank-Nicolson step for a fixed (operator, tau) pair.

    Holds the LU factorization of I - tau/2 L; step() applies
    (I + tau/2 L) and back-substitutes.  States are flat arrays here; the
    driver in simulate owns the StateVector packaging.
    """

    def __init__(self, op: TridiagonalOperator, tau: float):
        if not tau > 0.0:
            raise ValueError(f"tau must be positive, got {tau}")
        self.op = op
        self.tau = tau
        half = 0.5 * tau
        self._plus_lower = half * op.lower
        self._plus_main = 1.0 + half * op.main
        self._plus_upper = half * op.upper

        minus_lower = -half * op.lower
        minus_main = 1.0 - half * op.main
        minus_upper = -half * op.upper
        gttrf, gttrs = get_lapack_funcs(("gttrf", "gttrs"), (minus_main,))
        dl, d, du, du2, ipiv, info = gttrf(minus_lower, minus_main, minus_upper)
        if info != 0:
            raise LinearSolveError(f"factorization of I - tau/2 L failed (info = {info})")
        self._factors = (dl, d, du, du2, ipiv)
        self._gttrs = gttrs

    def step(self, p: np.ndarray) -> np.ndarray:
        """Advance a flat state by one time step."""
        rhs = self._plus_main * p
        rhs[:-1] += self._plus_upper * p[1:]
        rhs[1:] += self._plus_lower * p[:-1]
        x, info = self._gttrs(*self._factors, rhs, overwrite_b=True)
        if info != 0:
            raise LinearSolveError(f"back substitution failed (info = {info})")
        return x


def cn_step(
    op: TridiagonalOperator,
    p: StateVector | np.ndarray,
    tau: float,
) -> StateVector | np.ndarray:
    """One Crank-Nicolson step: solve (I - tau/2 L) p' = (I + tau/2 L) p.

    Convenience entry point for single steps; it solves through
    solve_tridiagonal each call.  Loops should build a CrankNicolsonStepper
    instead and reuse its factorization.  Returns the same representation
    it was given (StateVector in, StateVector out).
    """
    if not tau > 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    wrapped = isinstance(p, StateVector)
    flat = p.to_array() if wrapped else np.asarray(p, dtype=float)
    if flat.size != op.n:
        raise ValueError(f"state has {flat.size} entries, operator expects {op.n}")

    half = 0.5 * tau
    rhs = (1.0 + half * op.main) * flat
    rhs[:-1] += half * op.upper * flat[1:]
    rhs[1:] += half * op.lower * flat[:-1]
    x = solve_tridiagonal(-half * op.lower, 1.0 - half * op.main, -half * op.upper, rhs)
    return StateVector.from_array(x) if wrapped else x


def _record(
    t: float,
    p: np.ndarray,
    grid: GridSpec,
    epsilon: float,
    w: np.ndarray,
    wx: np.ndarray,
    w_bulk: np.ndarray,
) -> DiagnosticsRecord:
    rho = p[1:-1]
    # the free energy needs a nonnegative state; under-resolved runs can
    # undershoot past the round-off slack, and then the snapshot simply has
    # no energy value (min_entry records the violation)
    energy = None
    if epsilon > 0.0 and float(p.min()) >= -_ENERGY_NEG_TOL:
        energy = discrete_energy(p, grid, epsilon, neg_tol=_ENERGY_NEG_TOL)
    return DiagnosticsRecord(
        time=t,
        mass=float(np.dot(w, p)),
        first_moment=float(p[-1] + np.dot(wx, rho)),
        energy=energy,
        a=float(p[0]),
        b=float(p[-1]),
        rho_at_delta=float(rho[0]),
        rho_at_one_minus_delta=float(rho[-1]),
        min_entry=float(p.min()),
        l2_bulk=float(np.sqrt(np.dot(w_bulk, rho * rho))),
    )


def simulate(
    grid: GridSpec,
    epsilon: float,
    ic: InitialCondition,
    config: SolverConfig,
    snapshot_times: tuple[float, ...] = (),
) -> Trajectory:
    """Run the Crank-Nicolson scheme from an initial condition.

    Diagnostics are recorded at t = 0, every output_every-th step, and at
    the end.  Snapshots are captured at the first step whose time reaches
    each requested value (the recorded time is the actual step time);
    requests beyond t_final are ignored.  A non-finite state aborts with
    DivergenceError naming the step.
    """
    op = assemble_operator(grid, epsilon)
    stepper = CrankNicolsonStepper(op, config.tau)
    p = init_state(grid, ic).to_array()

    w = weight_vector(grid)
    wx = w[1:-1] * grid.nodes
    w_bulk = w[1:-1]

    pending = sorted(float(s) for s in snapshot_times)
    times: list[float] = []
    records: list[DiagnosticsRecord] = []
    snapshots: list[tuple[float, StateVector]] = []

    def emit(t: float, state: np.ndarray) -> None:
        times.append(t)
        records.append(_record(t, state, grid, epsilon, w, wx, w_bulk))

    def snap(t: float, state: np.ndarray) -> None:
        while pending and t >= pending[0] - 1e-12:
            pending.pop(0)
            snapshots.append((t, StateVector.from_array(state)))

    emit(0.0, p)
    snap(0.0, p)
    n_steps = config.n_steps
    for k in range(1, n_steps + 1):
        p = stepper.step(p)
        if not np.isfinite(p).all():
            raise DivergenceError(f"non-finite state at step {k} (t = {k * config.tau})")
        t = k * config.tau
        if k % config.output_every == 0 or k == n_steps:
            emit(t, p)
        snap(t, p)

    return Trajectory(
        times=np.asarray(times),
        records=records,
        snapshots=snapshots,
        final_state=StateVector.from_array(p),
        grid=grid,
        epsilon=epsilon,
    )


@dataclass(frozen=True)
class OrderEstimate:
    """Observed convergence order from a refinement family.

    levels are the refinement parameters (tau values or cell widths),
    errors the weighted-L2 distances to the reference solution, and
    pairwise_orders the log ratios between consecutive levels.  order is
    the least-squares slope of log(error) against log(level).
    """

    levels: np.ndarray
    errors: np.ndarray
    pairwise_orders: np.ndarray
    order: float


@dataclass(frozen=True)
class ConvergenceStudy:
    temporal: OrderEstimate
    spatial: OrderEstimate


def _fit_order(levels: np.ndarray, errors: np.ndarray) -> OrderEstimate:
    if np.any(errors <= 0.0):
        raise ValueError("zero error against reference; refine the probe setup")
    logl = np.log(levels)
    loge = np.log(errors)
    pairwise = np.diff(loge) / np.diff(logl)
    slope = float(np.polyfit(logl, loge, 1)[0])
    return OrderEstimate(levels=levels, errors=errors, pairwise_orders=pairwise, order=slope)


def _probe_state(
    grid: GridSpec, epsilon: float, ic: InitialCondition, tau: float, t_probe: float
) -> np.ndarray:
    config = SolverConfig(tau=tau, t_final=t_probe, output_every=max(1, round(t_probe / tau)))
    return simulate(grid, epsilon, ic, config).final_state.to_array()


def temporal_convergence(
    grid: GridSpec,
    epsilon: float,
    ic: InitialCondition,
    taus: tuple[float, ...],
    t_probe: float,
    tau_ref: float | None = None,
) -> OrderEstimate:
    """Observed time-stepping order against a fine-tau self-reference.

    Runs the same problem at each tau in taus plus at tau_ref (default:
    min(taus) / 16) and measures weighted-L2 distances at t_probe.
    """
    taus = tuple(sorted({float(t) for t in taus}, reverse=True))
    if len(taus) < 3:
        raise ValueError(f"need at least 3 distinct tau levels, got {len(taus)}")
    if tau_ref is None:
        tau_ref = min(taus) / 16.0
    if tau_ref >= min(taus):
        raise ValueError(f"tau_ref = {tau_ref} must be finer than min(taus) = {min(taus)}")

    w = weight_vector(grid)
    ref = _probe_state(grid, epsilon, ic, tau_ref, t_probe)
    errors = np.empty(len(taus))
    for k, tau in enumerate(taus):
        diff = _probe_state(grid, epsilon, ic, tau, t_probe) - ref
        errors[k] = np.sqrt(np.dot(w, diff * diff))
    return _fit_order(np.asarray(taus), errors)


def spatial_convergence(
    grids: tuple[GridSpec, ...],
    epsilon: float,
    ic: InitialCondition,
    tau: float,
    t_probe: float,
    grid_ref: GridSpec | None = None,
) -> OrderEstimate:
    """Observed spatial order against a fine-grid self-reference.

    All grids must share delta and be nested in the reference grid
    (reference n_cells divisible by each coarser n_cells); errors are
    measured on the coarse nodes in the coarse weighted L2 norm.
    """
    grids = tuple(sorted(grids, key=lambda g: g.n_cells))
    if len({g.n_cells for g in grids}) < 3:
        raise ValueError("need at least 3 distinct grid resolutions")
    if grid_ref is None:
        from .grid import build_grid

        grid_ref = build_grid(grids[0].delta, 2 * grids[-1].n_cells)
    if any(g.delta != grid_ref.delta for g in grids):
        raise ValueError("all grids must share the same delta")
    if any(grid_ref.n_cells % g.n_cells or grid_ref.n_cells == g.n_cells for g in grids):
        raise ValueError("reference grid must strictly refine every grid in the family")

    ref = _probe_state(grid_ref, epsilon, ic, tau, t_probe)
    errors = np.empty(len(grids))
    widths = np.empty(len(grids))
    for k, g in enumerate(grids):
        stride = grid_ref.n_cells // g.n_cells
        restricted = np.concatenate(([ref[0]], ref[1:-1][::stride], [ref[-1]]))
        diff = _probe_state(g, epsilon, ic, tau, t_probe) - restricted
        w = weight_vector(g)
        errors[k] = np.sqrt(np.dot(w, diff * diff))
        widths[k] = g.h
    return _fit_order(widths, errors)


def convergence_study(
    grids: tuple[GridSpec, ...],
    epsilon: float,
    ic: InitialCondition,
    taus: tuple[float, ...],
    t_probe: float,
    tau_ref: float | None = None,
    grid_ref: GridSpec | None = None,
) -> ConvergenceStudy:
    """Temporal and spatial order estimates in one call.

    The temporal study runs on the finest grid in the family; the spatial
    study uses the finest tau.  Each axis needs at least 3 distinct levels.
    """
    grids = tuple(sorted(grids, key=lambda g: g.n_cells))
    temporal = temporal_convergence(grids[-1], epsilon, ic, taus, t_probe, tau_ref)
    spatial = spatial_convergence(grids, epsilon, ic, min(taus), t_probe, grid_ref)
    return ConvergenceStudy(temporal=temporal, spatial=spatial)
