"""Truncated spatial grid, extended state vector, and initial conditions.

The solver works on the interval (delta, 1 - delta) split into N uniform
cells, plus two point masses a and b attached to the left and right ends.
The unknown is the extended vector p = (a, rho_0, ..., rho_N, b) of length
N + 3, paired with the quadrature weights w = (1, h/2, h, ..., h, h/2, 1)
so that <p, 1>_w is the total mass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GridSpec",
    "StateVector",
    "Uniform",
    "Step",
    "Gaussian",
    "WithBoundaryMass",
    "Custom",
    "InitialCondition",
    "build_grid",
    "weight_vector",
    "weighted_inner",
    "init_state",
]


@dataclass(frozen=True, eq=False)
class GridSpec:
    """Uniform grid on (delta, 1 - delta) with N cells and N + 1 nodes.

    Nodes are built mirror-symmetrically (the upper half is the reflection
    of the lower half about x = 1/2) so that x_i + x_{N-i} = 1 holds
    bit-exactly.  The reflection symmetry of the model then survives in
    floating point instead of drifting at round-off scale.
    """

    delta: float
    n_cells: int
    h: float
    nodes: np.ndarray

    @property
    def n_dof(self) -> int:
        """Length of the extended state vector (a, rho_0..rho_N, b)."""
        return self.n_cells + 3


@dataclass(frozen=True, eq=False)
class StateVector:
    """Extended state p = (a, rho_0, ..., rho_N, b).

    a and b are the point masses at the domain ends; rho holds the bulk
    density values at the N + 1 grid nodes.  The container does not force
    unit mass; initial conditions are normalized by init_state, and the
    integrator checks conservation rather than renormalizing.
    """

    a: float
    rho: np.ndarray
    b: float

    def to_array(self) -> np.ndarray:
        """Flatten to the (N + 3,) vector used by the linear algebra."""
        out = np.empty(self.rho.size + 2)
        out[0] = self.a
        out[1:-1] = self.rho
        out[-1] = self.b
        return out

    @classmethod
    def from_array(cls, p: np.ndarray) -> "StateVector":
        p = np.asarray(p, dtype=float)
        if p.ndim != 1 or p.size < 3:
            raise ValueError(f"state array must be 1-d with length >= 3, got shape {p.shape}")
        return cls(a=float(p[0]), rho=p[1:-1].copy(), b=float(p[-1]))


# Initial-condition variants.  Each one samples a bulk profile at the grid
# nodes; init_state then rescales the bulk so the total weighted mass is 1.


@dataclass(frozen=True)
class Uniform:
    """Flat bulk profile 1/(1 - 2 delta), no boundary mass."""


@dataclass(frozen=True)
class Step:
    """Piecewise-constant bulk: left_value for x < split_point, else right_value."""

    left_value: float
    right_value: float
    split_point: float = 0.5


@dataclass(frozen=True)
class Gaussian:
    """Gaussian bulk profile centered at x0 with width sigma, no boundary mass."""

    x0: float
    sigma: float


@dataclass(frozen=True)
class WithBoundaryMass:
    """Flat bulk at bulk_value plus prescribed boundary masses a0 and b0."""

    bulk_value: float
    a0: float
    b0: float


@dataclass(frozen=True)
class Custom:
    """Explicit bulk samples (length N + 1) plus optional boundary masses."""

    values: np.ndarray
    a0: float = 0.0
    b0: float = 0.0


InitialCondition = Uniform | Step | Gaussian | WithBoundaryMass | Custom


def build_grid(delta: float, n_cells: int) -> GridSpec:
    """Build the uniform grid on (delta, 1 - delta).

    Parameters
    ----------
    delta : float
        Truncation width, 0 < delta < 1/2.
    n_cells : int
        Number of cells N >= 2; there are N + 1 nodes x_i = delta + i h
        with h = (1 - 2 delta) / N.
    """
    delta = float(delta)
    n_cells = int(n_cells)
    if not 0.0 < delta < 0.5:
        raise ValueError(f"delta must lie in (0, 1/2), got {delta}")
    if n_cells < 2:
        raise ValueError(f"n_cells must be >= 2, got {n_cells}")

    h = (1.0 - 2.0 * delta) / n_cells
    m = n_cells // 2
    lower = delta + h * np.arange(m + 1)
    nodes = np.empty(n_cells + 1)
    nodes[: m + 1] = lower
    nodes[n_cells - m :] = (1.0 - lower)[::-1]
    if n_cells % 2 == 0:
        # delta + (N/2) h equals 1/2 exactly in real arithmetic; pin it so
        # the midpoint node is its own mirror image.
        nodes[m] = 0.5
    return GridSpec(delta=delta, n_cells=n_cells, h=h, nodes=nodes)


def weight_vector(grid: GridSpec) -> np.ndarray:
    """Quadrature weights w = (1, h/2, h, ..., h, h/2, 1) of length N + 3.

    The unit end weights act on the point masses a and b; the interior
    trapezoid weights integrate the bulk, summing to 1 - 2 delta.
    """
    w = np.full(grid.n_dof, grid.h)
    w[0] = w[-1] = 1.0
    w[1] = w[-2] = 0.5 * grid.h
    return w


def weighted_inner(f: np.ndarray, g: np.ndarray, w: np.ndarray) -> float:
    """Discrete inner product <f, g>_w = sum_i w_i f_i g_i."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    w = np.asarray(w, dtype=float)
    if not f.shape == g.shape == w.shape:
        raise ValueError(
            f"weighted_inner needs equal-length vectors, got {f.shape}, {g.shape}, {w.shape}"
        )
    return float(np.dot(w * f, g))


def _sample_bulk(grid: GridSpec, ic: InitialCondition) -> tuple[np.ndarray, float, float]:
    """Raw (unnormalized) bulk samples and boundary masses for a variant."""
    x = grid.nodes
    if isinstance(ic, Uniform):
        return np.full(x.size, 1.0 / (1.0 - 2.0 * grid.delta)), 0.0, 0.0
    if isinstance(ic, Step):
        if ic.left_value < 0.0 or ic.right_value < 0.0:
            raise ValueError("step values must be nonnegative")
        return np.where(x < ic.split_point, ic.left_value, ic.right_value), 0.0, 0.0
    if isinstance(ic, Gaussian):
        if not ic.sigma > 0.0:
            raise ValueError(f"gaussian sigma must be positive, got {ic.sigma}")
        z = (x - ic.x0) / ic.sigma
        return np.exp(-0.5 * z * z) / (ic.sigma * np.sqrt(2.0 * np.pi)), 0.0, 0.0
    if isinstance(ic, WithBoundaryMass):
        if ic.bulk_value < 0.0 or ic.a0 < 0.0 or ic.b0 < 0.0:
            raise ValueError("bulk_value, a0 and b0 must be nonnegative")
        return np.full(x.size, float(ic.bulk_value)), float(ic.a0), float(ic.b0)
    if isinstance(ic, Custom):
        values = np.asarray(ic.values, dtype=float)
        if values.shape != x.shape:
            raise ValueError(
                f"custom bulk needs {x.size} samples (one per node), got {values.size}"
            )
        if not np.all(np.isfinite(values)) or np.any(values < 0.0):
            raise ValueError("custom bulk samples must be finite and nonnegative")
        if ic.a0 < 0.0 or ic.b0 < 0.0:
            raise ValueError("a0 and b0 must be nonnegative")
        return values.copy(), float(ic.a0), float(ic.b0)
    raise TypeError(f"unknown initial-condition variant: {ic!r}")


def init_state(grid: GridSpec, ic: InitialCondition) -> StateVector:
    """Sample an initial condition and normalize it to unit total mass.

    The bulk profile is sampled at the nodes, then rescaled so that the
    weighted mass a0 + b0 + sum_i w_i rho_i is exactly 1.  Boundary masses
    are kept as prescribed; only the bulk absorbs the normalization.
    """
    rho, a0, b0 = _sample_bulk(grid, ic)
    target = 1.0 - a0 - b0
    if target < 0.0:
        raise ValueError(f"boundary masses a0 + b0 = {a0 + b0} exceed total mass 1")

    w = weight_vector(grid)
    bulk_mass = float(np.dot(w[1:-1], rho))
    if bulk_mass <= 0.0:
        if target > 0.0:
            raise ValueError("bulk profile has zero mass but must carry mass " f"{target}")
    else:
        rho = rho * (target / bulk_mass)
    return StateVector(a=a0, rho=rho, b=b0)
