"""Closed-form stationary quantities of the regularized system.

The stationary bulk profile is rho(x) = (A x + B) / (x (1 - x)); the
coefficients follow from the boundary balance rho(delta) = eps a and
rho(1 - delta) = eps b, and the total boundary mass at equilibrium has the
closed form 1 / (1 + eps delta (1 - delta) (ln(1 - delta) - ln delta)).
predicted_fixation gives the small-(eps, delta) limit targets for the
boundary masses from an initial condition alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import (
    GridSpec,
    InitialCondition,
    StateVector,
    init_state,
    weight_vector,
)

__all__ = [
    "EquilibriumProfile",
    "equilibrium_coefficients",
    "equilibrium_profile",
    "boundary_equilibrium_mass",
    "sample_equilibrium",
    "predicted_fixation",
]


@dataclass(frozen=True)
class EquilibriumProfile:
    """Stationary bulk profile (A x + B) / (x (1 - x)) with boundary masses.

    Satisfies the boundary compatibility (A delta + B) / (delta (1 - delta))
    = eps a_inf and its mirror at 1 - delta by construction.
    """

    A: float
    B: float
    delta: float
    epsilon: float
    a_inf: float
    b_inf: float


def _check_domain(epsilon: float, delta: float) -> None:
    if not 0.0 < delta < 0.5:
        raise ValueError(f"delta must lie in (0, 1/2), got {delta}")
    if epsilon < 0.0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")


def equilibrium_coefficients(
    a_inf: float, b_inf: float, epsilon: float, delta: float
) -> tuple[float, float]:
    """Profile coefficients (A, B) for given boundary masses.

    A = eps delta (1 - delta) (b_inf - a_inf) / (1 - 2 delta)
    B = eps delta (1 - delta) ((1 - delta) a_inf - delta b_inf) / (1 - 2 delta)
    """
    _check_domain(epsilon, delta)
    c = epsilon * delta * (1.0 - delta) / (1.0 - 2.0 * delta)
    return c * (b_inf - a_inf), c * ((1.0 - delta) * a_inf - delta * b_inf)


def equilibrium_profile(
    a_inf: float, b_inf: float, epsilon: float, delta: float
) -> EquilibriumProfile:
    """Build the stationary profile for a measured or prescribed mass split.

    The total a_inf + b_inf is pinned by boundary_equilibrium_mass, but the
    split between the two ends depends on the initial condition; it is an
    input here (taken from a long run, or from symmetry).
    """
    if a_inf < 0.0 or b_inf < 0.0:
        raise ValueError("boundary masses must be nonnegative")
    A, B = equilibrium_coefficients(a_inf, b_inf, epsilon, delta)
    return EquilibriumProfile(A=A, B=B, delta=delta, epsilon=epsilon, a_inf=a_inf, b_inf=b_inf)


def boundary_equilibrium_mass(epsilon: float, delta: float) -> float:
    """Equilibrium value of a + b: 1 / (1 + eps delta (1-delta) ln((1-delta)/delta))."""
    _check_domain(epsilon, delta)
    log_ratio = math.log(1.0 - delta) - math.log(delta)
    return 1.0 / (1.0 + epsilon * delta * (1.0 - delta) * log_ratio)


def sample_equilibrium(profile: EquilibriumProfile, grid: GridSpec) -> StateVector:
    """Sample the stationary profile at the grid nodes.

    Bulk values are (A x_i + B) / (x_i (1 - x_i)); the boundary slots carry
    a_inf and b_inf.  The state is returned as-is (no renormalization): its
    mass matches 1 only up to the quadrature error of the bulk integral.
    """
    if grid.delta != profile.delta:
        raise ValueError(
            f"grid delta {grid.delta} does not match profile delta {profile.delta}"
        )
    x = grid.nodes
    rho = (profile.A * x + profile.B) / (x * (1.0 - x))
    return StateVector(a=profile.a_inf, rho=rho, b=profile.b_inf)


def predicted_fixation(ic: InitialCondition, grid: GridSpec) -> tuple[float, float]:
    """Limit boundary masses implied by an initial condition.

    In the vanishing-(eps, delta) limit the left and right boundary masses
    tend to a(0) + int (1 - x) rho_0 dx and b(0) + int x rho_0 dx; both
    integrals use the grid's trapezoid weights, so the pair sums to the
    (unit) initial mass.
    """
    state = init_state(grid, ic)
    w_bulk = weight_vector(grid)[1:-1]
    x = grid.nodes
    b_pred = state.b + float(np.dot(w_bulk * x, state.rho))
    a_pred = state.a + float(np.dot(w_bulk * (1.0 - x), state.rho))
    return a_pred, b_pred
