import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fmanneal.exceptions import BudgetExceededError, InvalidDimensionError, InvalidLagError
from fmanneal.labs import (
    autocorrelation,
    binary_from_spin,
    brute_force_optimum,
    labs_evaluate,
    labs_objective,
    reference_optimum,
    spin_from_binary,
)

spins = st.lists(st.sampled_from([-1, 1]), min_size=2, max_size=40).map(np.array)


def naive_energy(s):
    n = len(s)
    return sum(sum(s[i] * s[i + k] for i in range(n - k)) ** 2 for k in range(1, n))


@pytest.mark.parametrize(
    "x, s",
    [((0, 0, 0), (-1, -1, -1)), ((1, 1, 1), (1, 1, 1)), ((1, 0, 1, 0), (1, -1, 1, -1))],
)
def test_spin_from_binary(x, s):
    assert spin_from_binary(x).tolist() == list(s)


def test_spin_from_binary_rejects_short():
    with pytest.raises(InvalidDimensionError):
        spin_from_binary([1])


@pytest.mark.parametrize("n", range(2, 13))
def test_binary_spin_roundtrip_exhaustive(n):
    for bits in itertools.product((0, 1), repeat=n):
        assert binary_from_spin(spin_from_binary(bits)).tolist() == list(bits)


@pytest.mark.parametrize(
    "s, k, expected",
    [((1, 1, 1), 1, 2), ((1, 1, -1), 1, 0), ((1, 1, -1), 2, -1)],
)
def test_autocorrelation(s, k, expected):
    assert autocorrelation(s, k) == expected


@pytest.mark.parametrize("k", [0, 3, -1])
def test_autocorrelation_bad_lag(k):
    with pytest.raises(InvalidLagError):
        autocorrelation((1, 1, -1), k)


def test_evaluate_all_ones():
    v = labs_evaluate((1, 1, 1))
    assert v.energy == 5
    assert v.merit_factor == pytest.approx(0.9)
    assert v.objective == pytest.approx(-0.9)


def test_evaluate_n3_optimum():
    v = labs_evaluate((1, 1, -1))
    assert (v.energy, v.merit_factor, v.objective) == (1, 4.5, -4.5)
    # exhaustive check that this is optimal for N=3
    energies = [naive_energy(np.array(s)) for s in itertools.product((-1, 1), repeat=3)]
    assert min(energies) == 1


def test_objective_on_binary():
    assert labs_objective(np.array([1.0, 1.0, 0.0])) == -4.5


@given(spins)
def test_negation_and_reversal_invariance(s):
    v = labs_evaluate(s)
    assert labs_evaluate(-s) == v
    assert labs_evaluate(s[::-1]) == v


@given(spins)
def test_energy_bounds_and_consistency(s):
    n = len(s)
    v = labs_evaluate(s)
    assert v.energy == naive_energy(s)
    assert 1 <= v.energy <= sum((n - k) ** 2 for k in range(1, n))
    assert v.merit_factor * 2 * v.energy == pytest.approx(n * n, rel=1e-12)
    assert v.objective == -v.merit_factor


@pytest.mark.parametrize("n", [2, 5, 17])
def test_all_ones_attains_upper_bound(n):
    assert labs_evaluate(np.ones(n, dtype=int)).energy == sum((n - k) ** 2 for k in range(1, n))


def test_brute_force_n2_tie_break():
    s, v = brute_force_optimum(2)
    assert s.tolist() == [-1, -1]
    assert v.energy == 1


def test_brute_force_n3():
    s, v = brute_force_optimum(3)
    assert v.energy == 1 and v.merit_factor == 4.5
    assert s.tolist() == [-1, -1, 1]


def _sequential_oracle(n):
    best = None
    for s in itertools.product((-1, 1), repeat=n):
        e = naive_energy(np.array(s))
        if best is None or e < best[0]:
            best = (e, s)
    return best


@pytest.mark.parametrize("n", [4, 7, 10])
def test_brute_force_matches_sequential_scan(n):
    e, s = _sequential_oracle(n)
    got_s, got_v = brute_force_optimum(n)
    assert got_v.energy == e
    assert tuple(got_s) == s


def test_brute_force_regression_constants():
    # Frozen from the exhaustive oracle; these agree with published LABS optima.
    assert brute_force_optimum(13)[1].energy == 6
    assert brute_force_optimum(16)[1].energy == 24
    assert reference_optimum(16) == pytest.approx(-256 / 48)


@pytest.mark.parametrize("n", [1, 25, 30])
def test_brute_force_cap(n):
    with pytest.raises(BudgetExceededError):
        brute_force_optimum(n)


def test_reference_optimum_n64_and_unknown():
    assert reference_optimum(64) == -9.84615385
    assert reference_optimum(101) is None
