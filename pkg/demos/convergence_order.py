"""Measure the observed convergence orders of the integrator.

Temporal: fix a grid, halve the step size repeatedly, and compare each run
at a probe time against a much finer reference run; the trapezoidal stepper
should show second order.  Spatial: fix the step size and refine the mesh
against a doubled-resolution reference, again expecting second order from
the centered flux differences.
"""

import numpy as np

from kimura_fv import Gaussian, build_grid, spatial_convergence, temporal_convergence

DELTA = 1e-3
EPSILON = 1e-3
IC = Gaussian(x0=0.4, sigma=0.1)


def main() -> None:
    grid = build_grid(DELTA, 400)
    temporal = temporal_convergence(
        grid, EPSILON, IC, taus=(4e-3, 2e-3, 1e-3), t_probe=1.0, tau_ref=1.25e-4
    )
    print("temporal refinement (tau halved twice, reference tau = 1.25e-4):")
    for tau, err in zip(temporal.levels, temporal.errors):
        print(f"  tau = {tau:<8g} error = {err:.6e}")
    print(f"  fitted order {temporal.order:.3f}, "
          f"pairwise {np.round(temporal.pairwise_orders, 3).tolist()}")

    grids = tuple(build_grid(DELTA, n) for n in (100, 200, 400))
    spatial = spatial_convergence(grids, EPSILON, IC, tau=1e-4, t_probe=0.5)
    print("spatial refinement (N doubled twice, reference N = 800):")
    for n, err in zip((100, 200, 400), spatial.errors):
        print(f"  N = {n:<6d} error = {err:.6e}")
    print(f"  fitted order {spatial.order:.3f}, "
          f"pairwise {np.round(spatial.pairwise_orders, 3).tolist()}")


if __name__ == "__main__":
    main()
