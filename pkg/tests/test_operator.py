"""Generator assembly: stencil values, conservation, and mirror symmetry."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kimura_fv import apply, assemble_operator, build_grid, face_flux, weight_vector
from kimura_fv.grid import StateVector


def test_face_flux_hand_oracle():
    # -(g(0.3)*1 - g(0.2)*2)/0.1 = -(0.21 - 0.32)/0.1 = 1.1
    assert face_flux(2.0, 1.0, 0.2, 0.3, 0.1) == pytest.approx(1.1, rel=1e-14)


def test_face_flux_vanishes_for_constant_g_rho():
    # g(x) rho(x) constant means zero flux
    xl, xr = 0.2, 0.35
    c = 0.7
    flux = face_flux(c / (xl * (1 - xl)), c / (xr * (1 - xr)), xl, xr, 0.15)
    assert flux == pytest.approx(0.0, abs=1e-14)


def test_assemble_operator_smallest_grid_dense_oracle():
    # delta = 0.25, N = 2: h = 0.25, nodes (0.25, 0.5, 0.75),
    # g = (0.1875, 0.25, 0.1875).  Every entry spelled out by hand.
    grid = build_grid(0.25, 2)
    eps = 0.5
    op = assemble_operator(grid, eps)
    h = 0.25
    g = np.array([0.1875, 0.25, 0.1875])
    expected = np.array(
        [
            [-eps, 1.0, 0.0, 0.0, 0.0],
            [2 * eps / h, -2 * g[0] / h**2 - 2 / h, 2 * g[1] / h**2, 0.0, 0.0],
            [0.0, g[0] / h**2, -2 * g[1] / h**2, g[2] / h**2, 0.0],
            [0.0, 0.0, 2 * g[1] / h**2, -2 * g[2] / h**2 - 2 / h, 2 * eps / h],
            [0.0, 0.0, 0.0, 1.0, -eps],
        ]
    )
    np.testing.assert_allclose(op.to_dense(), expected, rtol=1e-14, atol=0.0)


def test_assemble_operator_rejects_negative_epsilon():
    grid = build_grid(0.1, 4)
    with pytest.raises(ValueError):
        assemble_operator(grid, -1e-6)


@pytest.mark.parametrize("n_cells", [2, 3, 50, 51])
@pytest.mark.parametrize("epsilon", [0.0, 1e-3, 1.0])
def test_weighted_column_sums_vanish(n_cells, epsilon):
    # <L p, 1>_w = 0 for every p iff every weighted column sum is zero;
    # this is the exact-conservation property of the scheme
    grid = build_grid(1e-3, n_cells)
    op = assemble_operator(grid, epsilon)
    w = weight_vector(grid)
    col_sums = w @ op.to_dense()
    scale = np.abs(op.main).max()
    assert np.abs(col_sums).max() <= 1e-14 * scale


@given(st.integers(0, 2**31 - 1))
@settings(max_examples=25, deadline=None)
def test_generator_annihilates_mass_on_random_states(seed):
    rng = np.random.default_rng(seed)
    grid = build_grid(1e-2, 40)
    op = assemble_operator(grid, 1e-2)
    w = weight_vector(grid)
    p = rng.normal(size=grid.n_dof)
    rate = apply(op, p)
    scale = np.abs(op.main).max() * np.abs(p).max()
    assert abs(float(np.dot(w, rate))) <= 1e-13 * scale


def test_matvec_matches_dense():
    rng = np.random.default_rng(3)
    grid = build_grid(1e-2, 17)
    op = assemble_operator(grid, 0.3)
    p = rng.normal(size=grid.n_dof)
    np.testing.assert_allclose(op.matvec(p), op.to_dense() @ p, rtol=1e-13, atol=1e-13)


def test_apply_accepts_state_vector_and_flat():
    grid = build_grid(0.1, 4)
    op = assemble_operator(grid, 0.2)
    rng = np.random.default_rng(5)
    flat = rng.uniform(size=grid.n_dof)
    sv = StateVector.from_array(flat)
    np.testing.assert_array_equal(apply(op, sv), apply(op, flat))


def test_apply_rejects_wrong_length():
    grid = build_grid(0.1, 4)
    op = assemble_operator(grid, 0.2)
    with pytest.raises(ValueError):
        apply(op, np.ones(grid.n_dof + 1))


@pytest.mark.parametrize("n_cells", [6, 7])
def test_generator_commutes_with_mirror_reflection(n_cells):
    # R swaps a <-> b and reverses the bulk; the model is invariant under
    # x -> 1 - x, and the bit-exact mirrored grid keeps L R = R L to
    # round-off instead of O(h) asymmetry
    grid = build_grid(0.05, n_cells)
    op = assemble_operator(grid, 0.7)

    def reflect(p):
        return p[::-1].copy()

    rng = np.random.default_rng(11)
    p = rng.normal(size=grid.n_dof)
    lhs = apply(op, reflect(p))
    rhs = reflect(apply(op, p))
    scale = np.abs(op.main).max() * np.abs(p).max()
    np.testing.assert_allclose(lhs, rhs, atol=1e-13 * scale)


def test_epsilon_zero_is_pure_absorption():
    grid = build_grid(0.1, 4)
    op = assemble_operator(grid, 0.0)
    dense = op.to_dense()
    # boundary rows reduce to a' = rho_0, b' = rho_N
    assert dense[0, 0] == 0.0 and dense[0, 1] == 1.0
    assert dense[-1, -1] == 0.0 and dense[-1, -2] == 1.0
    # and the bulk no longer feels a or b
    assert dense[1, 0] == 0.0 and dense[-2, -1] == 0.0
