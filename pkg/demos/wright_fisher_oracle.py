"""Cross-check the solver's fixation prediction against a finite chain.

The discrete Wright-Fisher chain fixes at allele count 0 or 2N with
probabilities that depend only on the initial mean; the continuum solver
predicts the same split from the first moment of the initial density.
Both are computed here from the same bell-shaped start, along with the
chain-level identities (row-stochastic transitions, linear absorption
probabilities) that make the chain trustworthy as an oracle.
"""

import numpy as np

from kimura_fv import (
    Gaussian,
    WFModel,
    absorption_probabilities,
    build_grid,
    evolve_distribution,
    predicted_fixation,
    transition_matrix,
)


def main() -> None:
    model = WFModel(two_n=20)
    states = np.arange(model.n_states) / model.two_n

    matrix = transition_matrix(model)
    row_defect = float(np.abs(matrix.sum(axis=1) - 1.0).max())
    print(f"transition rows sum to one up to {row_defect:.1e}")

    absorb = absorption_probabilities(model)
    print(f"absorption probability vs i/2N: max gap {np.abs(absorb - states).max():.1e}")

    bell = np.exp(-0.5 * ((states - 0.4) / 0.1) ** 2)
    bell /= bell.sum()
    chain_fix = float(evolve_distribution(model, bell, 10_000)[-1])

    grid = build_grid(1e-4, 2000)
    a_inf, b_inf = predicted_fixation(Gaussian(x0=0.4, sigma=0.1), grid)

    print(f"chain mass fixed at 1 after 1e4 generations : {chain_fix:.6f}")
    print(f"solver-predicted fixation split             : a = {a_inf:.6f}, b = {b_inf:.6f}")
    print(f"|chain - solver| at the upper end           : {abs(chain_fix - b_inf):.2e}")


if __name__ == "__main__":
    main()
