"""Conserved and dissipated functionals of the extended state.

Mass and first moment are the conservation diagnostics; the discrete free
energy is the dissipation diagnostic (defined for epsilon > 0 only).  The
delayed-boundary residual checks that the integrated form of the boundary
ODE a' = rho(delta, t) - eps a is honored by a computed trajectory, and
detect_monotonicity locates interior extrema of scalar time series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GridSpec, StateVector, weight_vector

__all__ = [
    "DiagnosticsRecord",
    "total_mass",
    "first_moment",
    "discrete_energy",
    "delayed_bc_residual",
    "detect_monotonicity",
]


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Per-time snapshot of the scalar diagnostics.

    energy is None when the run has epsilon = 0 (the free energy is not
    defined there) or when the state has negative entries beyond round-off
    (under-resolved runs; the positivity violation shows up in min_entry).
    rho_at_delta / rho_at_one_minus_delta are the bulk traces at the first
    and last node; min_entry is the minimum over the whole extended vector
    (positivity monitor); l2_bulk is the weighted L2 norm of the bulk part
    alone.
    """

    time: float
    mass: float
    first_moment: float
    energy: float | None
    a: float
    b: float
    rho_at_delta: float
    rho_at_one_minus_delta: float
    min_entry: float
    l2_bulk: float


def _flat(p: StateVector | np.ndarray) -> np.ndarray:
    return p.to_array() if isinstance(p, StateVector) else np.asarray(p, dtype=float)


def total_mass(p: StateVector | np.ndarray, w: np.ndarray) -> float:
    """a + b + h(rho_0/2 + rho_1 + ... + rho_{N-1} + rho_N/2) = <p, 1>_w."""
    flat = _flat(p)
    if flat.size != w.size:
        raise ValueError(f"state has {flat.size} entries, weights have {w.size}")
    return float(np.dot(w, flat))


def first_moment(p: StateVector | np.ndarray, grid: GridSpec) -> float:
    """Discrete first moment: b plus the trapezoid quadrature of x rho.

    The point mass a sits at x = 0 and contributes nothing; b sits at x = 1.
    """
    flat = _flat(p)
    if flat.size != grid.n_dof:
        raise ValueError(f"state has {flat.size} entries, grid expects {grid.n_dof}")
    w = weight_vector(grid)
    return float(flat[-1] + np.dot(w[1:-1] * grid.nodes, flat[1:-1]))


def discrete_energy(
    p: StateVector | np.ndarray,
    grid: GridSpec,
    epsilon: float,
    neg_tol: float = 0.0,
) -> float:
    """Discrete free energy F_h(p).

    F_h = sum_i w_i rho_i ln(x_i(1-x_i) rho_i)  over bulk nodes
        + a ln(eps delta(1-delta) a) + b ln(eps delta(1-delta) b),

    with the convention 0 ln(0 c) = 0.  Entries in [-neg_tol, 0) are treated
    as exact zeros; anything below -neg_tol raises.  neg_tol = 0 is the
    strict default; trajectory drivers pass a small slack so that round-off
    negatives from the time stepper do not abort energy tracking.
    """
    if epsilon <= 0.0:
        raise ValueError("discrete_energy is undefined for epsilon = 0")
    flat = _flat(p)
    if flat.size != grid.n_dof:
        raise ValueError(f"state has {flat.size} entries, grid expects {grid.n_dof}")
    if neg_tol < 0.0:
        raise ValueError(f"neg_tol must be nonnegative, got {neg_tol}")
    low = float(flat.min())
    if low < -neg_tol:
        raise ValueError(f"state has negative entry {low}, below tolerance {-neg_tol}")

    flat = np.where(flat > 0.0, flat, 0.0)
    x = grid.nodes
    g = x * (1.0 - x)
    gd = grid.delta * (1.0 - grid.delta)
    w = weight_vector(grid)

    rho = flat[1:-1]
    pos = rho > 0.0
    bulk = np.zeros_like(rho)
    bulk[pos] = rho[pos] * np.log(g[pos] * rho[pos])
    total = float(np.dot(w[1:-1], bulk))

    a, b = float(flat[0]), float(flat[-1])
    if a > 0.0:
        total += a * math.log(epsilon * gd * a)
    if b > 0.0:
        total += b * math.log(epsilon * gd * b)
    return total


def delayed_bc_residual(
    times: np.ndarray,
    rho_at_delta: np.ndarray,
    a_values: np.ndarray,
    epsilon: float,
) -> float:
    """Worst-case defect of the integrated boundary law.

    The boundary ODE a' = rho(delta, t) - eps a with a(0) = 0 integrates to
    a(t) = exp(-eps t) * int_0^t exp(eps s) rho(delta, s) ds.  The integral
    is accumulated with a damped trapezoid recurrence (each step multiplies
    the running value by exp(-eps dt), which stays bounded for any eps t),
    and the residual is max_k |a_k - integral_k|.

    Requires uniformly spaced times starting at t = 0 with a(0) = 0.
    """
    times = np.asarray(times, dtype=float)
    rho_at_delta = np.asarray(rho_at_delta, dtype=float)
    a_values = np.asarray(a_values, dtype=float)
    if not times.shape == rho_at_delta.shape == a_values.shape:
        raise ValueError("times, rho_at_delta and a_values must have equal length")
    if times.size < 2:
        raise ValueError("need at least two samples")
    dt = np.diff(times)
    if dt.min() <= 0.0 or (dt.max() - dt.min()) > 1e-9 * dt.max():
        raise ValueError("times must be uniformly spaced and increasing")
    if abs(a_values[0]) > 1e-14:
        raise ValueError(f"a(0) must vanish, got {a_values[0]}")

    step = float(dt.mean())
    decay = float(np.exp(-epsilon * step))
    acc = 0.0
    worst = abs(a_values[0])
    for k in range(1, times.size):
        acc = acc * decay + 0.5 * step * (rho_at_delta[k - 1] * decay + rho_at_delta[k])
        worst = max(worst, abs(a_values[k] - acc))
    return worst


def detect_monotonicity(
    times: np.ndarray,
    values: np.ndarray,
    noise_rel: float = 1e-12,
) -> list[tuple[float, str]]:
    """Interior extrema of a sampled series as (time, "max"|"min") pairs.

    Successive differences with magnitude at most noise_rel * max|values|
    count as ties and never produce extrema, so round-off wiggle on a flat
    stretch is ignored.  An empty list means the series is monotone within
    that floor.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape:
        raise ValueError("times and values must have equal length")
    if times.size < 3:
        raise ValueError("need at least three samples")

    floor = noise_rel * float(np.abs(values).max()) if values.size else 0.0
    diffs = np.diff(values)
    out: list[tuple[float, str]] = []
    prev_sign = 0
    for k, d in enumerate(diffs):
        sign = 0 if abs(d) <= floor else (1 if d > 0.0 else -1)
        if sign == 0:
            continue
        if prev_sign == 1 and sign == -1:
            out.append((float(times[k]), "max"))
        elif prev_sign == -1 and sign == 1:
            out.append((float(times[k]), "min"))
        prev_sign = sign
    return out
