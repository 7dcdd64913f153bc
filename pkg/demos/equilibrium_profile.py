"""Long-run convergence onto the closed-form equilibrium.

For a few bulk resolutions, integrates the uniform initial condition far
past the bulk relaxation time and compares the final profile against the
exponential equilibrium density evaluated with the run's own boundary
masses.  That comparison lands at round-off for every mesh, because the
sampled equilibrium family is stationary for the discretization itself.
The mesh shows up in where the boundary masses settle: the total a + b
approaches the closed-form split as N grows.
"""

import numpy as np

from kimura_fv import (
    SolverConfig,
    Uniform,
    boundary_equilibrium_mass,
    build_grid,
    equilibrium_profile,
    sample_equilibrium,
    simulate,
)

DELTA = 1e-3
EPSILON = 1e-3


def main() -> None:
    target = boundary_equilibrium_mass(EPSILON, DELTA)
    print(f"closed-form equilibrium boundary total a + b = {target:.10f}")
    print(f"{'N':>6} {'a + b at t=50':>16} {'|a+b - target|':>15} {'profile gap':>13}")

    for n_cells in (250, 500, 1000):
        grid = build_grid(DELTA, n_cells)
        config = SolverConfig(tau=5e-3, t_final=50.0, output_every=100)
        trajectory = simulate(grid, EPSILON, Uniform(), config)

        final = trajectory.final_state
        profile = equilibrium_profile(final.a, final.b, EPSILON, DELTA)
        expected = sample_equilibrium(profile, grid).rho
        gap = float(np.abs(final.rho - expected).max() / np.abs(expected).max())
        total = final.a + final.b
        print(f"{n_cells:>6} {total:>16.10f} {abs(total - target):>15.3e} {gap:>13.3e}")


if __name__ == "__main__":
    main()
