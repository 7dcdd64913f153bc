"""Wright-Fisher chain oracle: transitions, absorption, sampling."""

import math

import numpy as np
import pytest

from kimura_fv import (
    WFModel,
    absorption_probabilities,
    evolve_distribution,
    fixation_fraction_mc,
    sample_path,
    transition_matrix,
    transition_row,
)


def binom_pmf_by_hand(n, p):
    """Reference pmf from math.comb, independent of any stats library."""
    return np.array(
        [math.comb(n, j) * p**j * (1.0 - p) ** (n - j) for j in range(n + 1)]
    )


def test_transition_row_pure_drift_hand_values():
    # 2N = 2, i = 1: p = 1/2, row = (1/4, 1/2, 1/4)
    row = transition_row(WFModel(two_n=2), 1)
    np.testing.assert_allclose(row, [0.25, 0.5, 0.25], atol=1e-15)


def test_transition_row_with_mutation_matches_comb_oracle():
    model = WFModel(two_n=4, u=0.1, v=0.05)
    # p_1 = 0.9 * 0.25 + 0.05 * 0.75 = 0.2625
    assert model.success_probability(1) == pytest.approx(0.2625, rel=1e-15)
    row = transition_row(model, 1)
    np.testing.assert_allclose(row, binom_pmf_by_hand(4, 0.2625), rtol=1e-12)


def test_transition_row_rejects_out_of_range_state():
    with pytest.raises(ValueError):
        transition_row(WFModel(two_n=4), 5)


def test_transition_matrix_rows_match_transition_row():
    model = WFModel(two_n=7, u=0.02, v=0.03)
    matrix = transition_matrix(model)
    for i in range(model.n_states):
        np.testing.assert_allclose(matrix[i], transition_row(model, i), rtol=1e-13)


@pytest.mark.parametrize("model", [WFModel(10), WFModel(25, u=0.1), WFModel(3, u=0.5, v=0.5)])
def test_transition_matrix_is_row_stochastic(model):
    matrix = transition_matrix(model)
    assert np.all(matrix >= 0.0)
    np.testing.assert_allclose(matrix.sum(axis=1), 1.0, atol=1e-13)


def test_pure_drift_endpoints_are_absorbing():
    matrix = transition_matrix(WFModel(two_n=6))
    expected0 = np.zeros(7)
    expected0[0] = 1.0
    np.testing.assert_allclose(matrix[0], expected0, atol=1e-15)
    expected1 = np.zeros(7)
    expected1[-1] = 1.0
    np.testing.assert_allclose(matrix[-1], expected1, atol=1e-15)


def test_mutation_reopens_the_endpoints():
    matrix = transition_matrix(WFModel(two_n=6, v=0.1))
    assert matrix[0, 0] < 1.0
    assert matrix[0, 1] > 0.0


def test_dense_matrix_size_limit():
    with pytest.raises(ValueError):
        transition_matrix(WFModel(two_n=5000))


def test_evolve_distribution_conserves_probability():
    model = WFModel(two_n=12, u=0.01, v=0.02)
    dist = np.full(13, 1.0 / 13.0)
    out = evolve_distribution(model, dist, 25)
    assert out.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(out >= -1e-15)


def test_evolve_distribution_mean_is_martingale_under_pure_drift():
    model = WFModel(two_n=16)
    states = np.arange(17) / 16.0
    dist = np.zeros(17)
    dist[5] = 1.0
    out = evolve_distribution(model, dist, 200)
    assert float(states @ out) == pytest.approx(5.0 / 16.0, abs=1e-13)


def test_evolve_distribution_zero_steps_is_identity():
    model = WFModel(two_n=4)
    dist = np.array([0.1, 0.2, 0.4, 0.2, 0.1])
    np.testing.assert_array_equal(evolve_distribution(model, dist, 0), dist)


def test_evolve_distribution_validation():
    model = WFModel(two_n=4)
    with pytest.raises(ValueError):
        evolve_distribution(model, np.ones(5), 1)  # sums to 5
    with pytest.raises(ValueError):
        evolve_distribution(model, np.array([0.5, 0.5, 0.0, 0.0]), 1)  # wrong length
    with pytest.raises(ValueError):
        evolve_distribution(model, np.full(5, 0.2), -1)


def test_absorption_probabilities_linear_in_start():
    model = WFModel(two_n=20)
    expected = np.arange(21) / 20.0
    np.testing.assert_allclose(absorption_probabilities(model), expected, atol=1e-12)


def test_absorption_probabilities_edge_population():
    np.testing.assert_array_equal(absorption_probabilities(WFModel(two_n=1)), [0.0, 1.0])


def test_absorption_probabilities_rejects_mutation():
    with pytest.raises(ValueError):
        absorption_probabilities(WFModel(two_n=4, u=0.1))


def test_sample_path_deterministic_and_in_range():
    model = WFModel(two_n=30)
    path1 = sample_path(model, 12, 100, seed=7)
    path2 = sample_path(model, 12, 100, seed=7)
    np.testing.assert_array_equal(path1, path2)
    assert path1[0] == 12
    assert path1.size == 101
    assert np.all((path1 >= 0) & (path1 <= 30))
    assert not np.array_equal(path1, sample_path(model, 12, 100, seed=8))


def test_sample_path_absorbing_states_stay_put():
    model = WFModel(two_n=10)
    np.testing.assert_array_equal(sample_path(model, 0, 50, seed=1), np.zeros(51))
    np.testing.assert_array_equal(sample_path(model, 10, 50, seed=1), np.full(51, 10))


def test_sample_path_validation():
    with pytest.raises(ValueError):
        sample_path(WFModel(two_n=4), 5, 10, seed=0)
    with pytest.raises(ValueError):
        sample_path(WFModel(two_n=4), 2, -1, seed=0)


def test_fixation_fraction_mc_recovers_linear_law():
    # fixation probability from i0 is i0/2N; with 4000 paths the binomial
    # standard error is about 0.0077, so 4 sigma gives a 0.031 window
    model = WFModel(two_n=50)
    frac = fixation_fraction_mc(model, 20, n_paths=4000, n_steps=1000, seed=11)
    assert abs(frac - 0.4) <= 4.0 * math.sqrt(0.4 * 0.6 / 4000)


def test_fixation_fraction_mc_endpoints():
    model = WFModel(two_n=8)
    assert fixation_fraction_mc(model, 0, 100, 10, seed=0) == 0.0
    assert fixation_fraction_mc(model, 8, 100, 10, seed=0) == 1.0


def test_fixation_fraction_mc_validation():
    with pytest.raises(ValueError):
        fixation_fraction_mc(WFModel(two_n=4), 9, 10, 10, seed=0)
    with pytest.raises(ValueError):
        fixation_fraction_mc(WFModel(two_n=4), 2, 0, 10, seed=0)


def test_model_validation():
    with pytest.raises(ValueError):
        WFModel(two_n=0)
    with pytest.raises(ValueError):
        WFModel(two_n=4, u=1.5)
    with pytest.raises(ValueError):
        WFModel(two_n=4, v=-0.1)
