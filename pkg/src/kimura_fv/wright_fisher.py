"""Wright-Fisher chain used as an independent oracle for the solver.

The chain lives on allele counts 0..2N; one generation resamples the count
from Binomial(2N, p_i) with p_i = (1 - u) i/2N + v (1 - i/2N).  With
u = v = 0 (pure drift) the endpoints are absorbing, the distribution mean
is invariant, and the fixation probability from count i is exactly i/2N;
these are the facts the solver's diagnostics are checked against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

__all__ = [
    "WFModel",
    "transition_row",
    "transition_matrix",
    "evolve_distribution",
    "absorption_probabilities",
    "sample_path",
    "fixation_fraction_mc",
]

# dense transition matrices above this population size get expensive;
# larger chains should use the sampling path
_DENSE_LIMIT = 2048


@dataclass(frozen=True)
class WFModel:
    """Chain parameters: population size 2N and mutation probabilities u, v."""

    two_n: int
    u: float = 0.0
    v: float = 0.0

    def __post_init__(self) -> None:
        if self.two_n < 1:
            raise ValueError(f"two_n must be >= 1, got {self.two_n}")
        if not 0.0 <= self.u <= 1.0 or not 0.0 <= self.v <= 1.0:
            raise ValueError(f"mutation rates must lie in [0, 1], got u={self.u}, v={self.v}")

    @property
    def n_states(self) -> int:
        return self.two_n + 1

    def success_probability(self, i: int | np.ndarray) -> float | np.ndarray:
        """Offspring allele probability p_i = (1-u) i/2N + v (1 - i/2N)."""
        freq = np.asarray(i, dtype=float) / self.two_n
        out = (1.0 - self.u) * freq + self.v * (1.0 - freq)
        return float(out) if np.isscalar(i) else out


def transition_row(model: WFModel, i: int) -> np.ndarray:
    """Row i of the transition matrix: Binomial(2N, p_i) probabilities."""
    if not 0 <= i <= model.two_n:
        raise ValueError(f"state {i} outside 0..{model.two_n}")
    j = np.arange(model.n_states)
    return binom.pmf(j, model.two_n, model.success_probability(i))


def transition_matrix(model: WFModel) -> np.ndarray:
    """Dense (2N+1) x (2N+1) row-stochastic transition matrix."""
    if model.two_n > _DENSE_LIMIT:
        raise ValueError(
            f"dense matrix limited to two_n <= {_DENSE_LIMIT}; use sample_path for larger chains"
        )
    j = np.arange(model.n_states)
    p = model.success_probability(j)[:, None]
    return binom.pmf(j[None, :], model.two_n, p)


def evolve_distribution(model: WFModel, dist: np.ndarray, k: int) -> np.ndarray:
    """Push a distribution over states forward k generations."""
    dist = np.asarray(dist, dtype=float)
    if dist.shape != (model.n_states,):
        raise ValueError(f"distribution must have {model.n_states} entries, got {dist.shape}")
    if np.any(dist < 0.0) or abs(dist.sum() - 1.0) > 1e-10:
        raise ValueError("input must be a probability vector (nonnegative, unit sum)")
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    matrix = transition_matrix(model)
    out = dist.copy()
    for _ in range(k):
        out = out @ matrix
    return out


def absorption_probabilities(model: WFModel) -> np.ndarray:
    """Fixation probability at count 2N from each start, pure drift only.

    Solves (I - Q) hit = r on the transient states 1..2N-1, where Q is the
    interior transition block and r the one-step probabilities of jumping
    straight to 2N.  For pure drift the result is i / 2N.
    """
    if model.u != 0.0 or model.v != 0.0:
        raise ValueError("absorption requires pure drift (u = v = 0)")
    matrix = transition_matrix(model)
    q = matrix[1:-1, 1:-1]
    r = matrix[1:-1, -1]
    hit = np.linalg.solve(np.eye(model.two_n - 1) - q, r) if model.two_n > 1 else np.empty(0)
    return np.concatenate(([0.0], hit, [1.0]))


def sample_path(model: WFModel, i0: int, k: int, seed: int) -> np.ndarray:
    """One chain realization of length k + 1; deterministic per seed."""
    if not 0 <= i0 <= model.two_n:
        raise ValueError(f"start state {i0} outside 0..{model.two_n}")
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    rng = np.random.default_rng(seed)
    path = np.empty(k + 1, dtype=np.int64)
    path[0] = i0
    state = i0
    for step in range(1, k + 1):
        state = int(rng.binomial(model.two_n, model.success_probability(state)))
        path[step] = state
    return path


def fixation_fraction_mc(
    model: WFModel, i0: int, n_paths: int, n_steps: int, seed: int
) -> float:
    """Monte Carlo fraction of paths fixed at 2N after n_steps generations.

    Paths are advanced in one vectorized batch; with pure drift, states 0
    and 2N are absorbing, so n_steps only needs to cover the absorption
    time scale.  Deterministic per seed.
    """
    if not 0 <= i0 <= model.two_n:
        raise ValueError(f"start state {i0} outside 0..{model.two_n}")
    if n_paths < 1 or n_steps < 0:
        raise ValueError("need n_paths >= 1 and n_steps >= 0")
    rng = np.random.default_rng(seed)
    states = np.full(n_paths, i0, dtype=np.int64)
    for _ in range(n_steps):
        states = rng.binomial(model.two_n, model.success_probability(states))
    return float(np.mean(states == model.two_n))
