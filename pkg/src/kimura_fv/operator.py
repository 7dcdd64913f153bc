"""Semi-discrete generator of the regularized drift equation.

The bulk follows d(rho)/dt = d^2/dx^2 (x(1-x) rho) in finite-volume form
with central face fluxes, and the boundary masses follow
da/dt = rho_0 - eps a, db/dt = rho_N - eps b.  The exchange terms are
mirrored into the adjacent half cells with weight 2/h, which is the unique
pairing that makes every weighted column sum of the generator vanish, i.e.
the scheme conserves <p, 1>_w exactly.

In the ordering (a, rho_0, ..., rho_N, b) the generator is tridiagonal, so
it is stored as three diagonals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridSpec, StateVector

__all__ = ["TridiagonalOperator", "face_flux", "assemble_operator", "apply"]


@dataclass(frozen=True, eq=False)
class TridiagonalOperator:
    """Tridiagonal matrix L stored by diagonals, acting on (a, rho_0..rho_N, b).

    lower has length n - 1 (entries L[i+1, i]), main has length n, upper has
    length n - 1 (entries L[i, i+1]) for n = N + 3.
    """

    lower: np.ndarray
    main: np.ndarray
    upper: np.ndarray
    epsilon: float
    grid: GridSpec

    @property
    def n(self) -> int:
        return self.main.size

    def matvec(self, p: np.ndarray) -> np.ndarray:
        """L @ p for a flat vector p."""
        out = self.main * p
        out[:-1] += self.upper * p[1:]
        out[1:] += self.lower * p[:-1]
        return out

    def to_dense(self) -> np.ndarray:
        """Dense matrix form; for small systems and cross-checks only."""
        return (
            np.diag(self.main)
            + np.diag(self.upper, 1)
            + np.diag(self.lower, -1)
        )


def face_flux(rho_left: float, rho_right: float, x_left: float, x_right: float, h: float) -> float:
    """Central flux -(1/h) (g(x_right) rho_right - g(x_left) rho_left), g(x) = x(1-x)."""
    return -(x_right * (1.0 - x_right) * rho_right - x_left * (1.0 - x_left) * rho_left) / h


def _mobility(grid: GridSpec) -> np.ndarray:
    """g_i = x_i (1 - x_i), mirrored so that g_i == g_{N-i} bit-exactly."""
    x = grid.nodes
    g = x * (1.0 - x)
    m = grid.n_cells // 2
    g[grid.n_cells - m :] = g[: m + 1][::-1].copy()
    return g


def assemble_operator(grid: GridSpec, epsilon: float) -> TridiagonalOperator:
    """Assemble the generator for exchange rate epsilon >= 0.

    Row by row (g_i = x_i(1 - x_i)):

        a:      da/dt     = rho_0 - eps a
        rho_0:  drho_0/dt = (2/h^2)(g_1 rho_1 - g_0 rho_0) + (2/h)(eps a - rho_0)
        rho_i:  drho_i/dt = (g_{i-1} rho_{i-1} - 2 g_i rho_i + g_{i+1} rho_{i+1}) / h^2
        rho_N:  drho_N/dt = (2/h^2)(g_{N-1} rho_{N-1} - g_N rho_N) + (2/h)(eps b - rho_N)
        b:      db/dt     = rho_N - eps b

    epsilon = 0 is admitted: the boundary rows degenerate to pure absorption
    a' = rho_0, b' = rho_N.
    """
    epsilon = float(epsilon)
    if epsilon < 0.0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")

    h = grid.h
    g = _mobility(grid)
    n = grid.n_dof

    lower = np.zeros(n - 1)
    main = np.zeros(n)
    upper = np.zeros(n - 1)

    # a row: -eps on the diagonal, +1 on rho_0
    main[0] = -epsilon
    upper[0] = 1.0

    # rho_0 row: 2 eps / h from a, diffusion to rho_1, loss to a
    lower[0] = 2.0 * epsilon / h
    main[1] = -2.0 * g[0] / h**2 - 2.0 / h
    upper[1] = 2.0 * g[1] / h**2

    # interior rows rho_1 .. rho_{N-1}
    i = np.arange(1, grid.n_cells)
    lower[i] = g[i - 1] / h**2
    main[i + 1] = -2.0 * g[i] / h**2
    upper[i + 1] = g[i + 1] / h**2

    # rho_N row, mirror of rho_0
    lower[n - 3] = 2.0 * g[grid.n_cells - 1] / h**2
    main[n - 2] = -2.0 * g[grid.n_cells] / h**2 - 2.0 / h
    upper[n - 2] = 2.0 * epsilon / h

    # b row
    lower[n - 2] = 1.0
    main[n - 1] = -epsilon

    return TridiagonalOperator(lower=lower, main=main, upper=upper, epsilon=epsilon, grid=grid)


def apply(op: TridiagonalOperator, p: StateVector | np.ndarray) -> np.ndarray:
    """Evaluate L p, returning the flat rate vector of length N + 3."""
    flat = p.to_array() if isinstance(p, StateVector) else np.asarray(p, dtype=float)
    if flat.ndim != 1 or flat.size != op.n:
        raise ValueError(f"state has {flat.size} entries, operator expects {op.n}")
    return op.matvec(flat)
