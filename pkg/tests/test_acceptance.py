"""End-to-end validation: the eleven numbered checks at the desk profile.

The whole experiment battery runs once per session (about twenty seconds:
four named experiments, two 50-unit equilibration runs, the epsilon and
delta sweeps, the order study, and the chain oracle); each test then
asserts one numbered criterion and prints its one-line verdict.  Pinned
tolerances live in kimura_fv.experiments next to the check definitions,
so the CLI `suite` command and this module can never drift apart.
"""

import pytest

from kimura_fv import DESK_PROFILE, run_suite


@pytest.fixture(scope="session")
def suite_report():
    return run_suite(*DESK_PROFILE)


def _verdict(report, number):
    result = next(c for c in report.criteria if c.number == number)
    flag = "PASS" if result.passed else "FAIL"
    line = f"[{flag}] {result.number:2d} {result.name}: {result.detail}"
    print(line)
    assert result.passed, line
    return result


def test_criterion_01_mass_conservation(suite_report):
    result = _verdict(suite_report, 1)
    assert result.measured["max_drift"] <= 1e-11


def test_criterion_02_boundary_symmetry(suite_report):
    result = _verdict(suite_report, 2)
    assert result.measured["max_gap"] <= 1e-11


def test_criterion_03_first_moment(suite_report):
    result = _verdict(suite_report, 3)
    assert result.measured["uniform_deviation"] <= 1e-10
    assert result.measured["gaussian_relative_drift"] <= 1e-2


def test_criterion_04_energy_decay(suite_report):
    result = _verdict(suite_report, 4)
    assert result.measured["max_energy_rise"] <= 1e-10


def test_criterion_05_fixation_mass(suite_report):
    result = _verdict(suite_report, 5)
    assert result.measured["deviation_formula"] <= 1e-3
    assert result.measured["deviation_one"] <= 2e-3


def test_criterion_06_equilibrium_profile(suite_report):
    result = _verdict(suite_report, 6)
    assert result.measured["deviation"] <= 2e-2


def test_criterion_07_epsilon_scaling(suite_report):
    result = _verdict(suite_report, 7)
    assert 0.9 <= result.measured["slope"] <= 1.1


def test_criterion_08_nonmonotone_boundary_mass(suite_report):
    result = _verdict(suite_report, 8)
    assert result.measured["n_minima"] >= 1


def test_criterion_09_temporal_order(suite_report):
    result = _verdict(suite_report, 9)
    assert 1.7 <= result.measured["order"] <= 2.2


def test_criterion_10_wright_fisher_oracle(suite_report):
    result = _verdict(suite_report, 10)
    assert result.measured["cross_gap"] <= 1e-2


def test_criterion_11_delayed_boundary_residual(suite_report):
    result = _verdict(suite_report, 11)
    assert result.measured["residual"] <= 1e-5
