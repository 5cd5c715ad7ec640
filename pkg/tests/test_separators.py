import numpy as np
import pytest

from qaoasat import SatInstance, brute_force_oracle, generate_random_instance
from qaoasat.errors import DimensionMismatchError, InvalidThresholdError
from qaoasat.separators import (
    SeparatorSpec,
    apply_separator,
    build_separator,
    parse_separator,
)
from qaoasat.statevector import Statevector, uniform_state

from .conftest import random_state


@pytest.fixture
def hard_table():
    return brute_force_oracle(generate_random_instance(6, 3, 6, seed=21))


def test_objective_diag(two_clause):
    sep = build_separator(brute_force_oracle(two_clause), SeparatorSpec.objective())
    assert list(sep.diag) == [1, 2, 2, 1]
    assert sep.marked_count is None


def test_threshold_at_cmax_marks_ground_states(hard_table):
    sep = build_separator(hard_table, SeparatorSpec.thresh(hard_table.c_max))
    np.testing.assert_array_equal(np.flatnonzero(sep.diag), hard_table.ground_states)
    assert sep.marked_count == len(hard_table.ground_states)
    assert set(np.unique(sep.diag)) <= {0.0, 1.0}


def test_threshold_one_is_global_phase():
    # every assignment satisfies at least one of two complementary unit clauses
    inst = SatInstance.from_lists(2, [[1], [-1]])
    sep = build_separator(brute_force_oracle(inst), SeparatorSpec.thresh(1))
    np.testing.assert_array_equal(sep.diag, np.ones(4))


def test_threshold_range(hard_table):
    with pytest.raises(InvalidThresholdError):
        build_separator(hard_table, SeparatorSpec.thresh(hard_table.m + 1))
    with pytest.raises(InvalidThresholdError):
        SeparatorSpec.thresh(0)
    with pytest.raises(InvalidThresholdError):
        build_separator(hard_table, SeparatorSpec.thresh())


@pytest.mark.parametrize("label", ["obj", "th:7", "th:auto"])
def test_label_round_trip(label):
    assert parse_separator(label).label == label


@pytest.mark.parametrize("label", ["objective", "th:", "th:x", "th:-1"])
def test_label_rejects(label):
    with pytest.raises(InvalidThresholdError):
        parse_separator(label)


def test_gamma_zero_identity(hard_table, rng):
    psi = random_state(rng, 6)
    out = apply_separator(Statevector(6, psi.copy()), build_separator(hard_table, SeparatorSpec.objective()), 0.0)
    np.testing.assert_array_equal(out.amplitudes, psi)


def test_threshold_pi_is_oracle(hard_table):
    sep = build_separator(hard_table, SeparatorSpec.thresh(hard_table.c_max))
    out = apply_separator(uniform_state(6), sep, np.pi)
    expected = np.where(sep.diag == 1, -1.0, 1.0) * 2 ** -3
    np.testing.assert_allclose(out.amplitudes, expected, atol=1e-15)


@pytest.mark.parametrize("kind", ["obj", "th:30"])
def test_periodic_and_diagonal(hard_table, rng, kind):
    sep = build_separator(hard_table, parse_separator(kind))
    psi = random_state(rng, 6)
    gamma = rng.uniform(0, 2 * np.pi)
    a = apply_separator(Statevector(6, psi.copy()), sep, gamma)
    np.testing.assert_allclose(np.abs(a.amplitudes), np.abs(psi), atol=1e-15)
    b = apply_separator(Statevector(6, psi.copy()), sep, gamma + 2 * np.pi)
    np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-12)


def test_objective_two_pi_identity(hard_table, rng):
    psi = random_state(rng, 6)
    out = apply_separator(Statevector(6, psi.copy()), build_separator(hard_table, SeparatorSpec.objective()), 2 * np.pi)
    np.testing.assert_allclose(out.amplitudes, psi, atol=1e-12)


def test_dimension_mismatch(hard_table):
    sep = build_separator(hard_table, SeparatorSpec.objective())
    with pytest.raises(DimensionMismatchError):
        apply_separator(uniform_state(5), sep, 0.1)
