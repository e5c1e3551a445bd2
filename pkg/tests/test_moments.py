import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from yuleheights.closed_forms import StatisticId as S
from yuleheights.closed_forms import statistic
from yuleheights.harmonic import harmonic
from yuleheights.moments import (
    coefficient, coefficient_table, height_moment, laplace_height, laplace_moment, laplace_tau,
    partitions, shared_moment, tau_moment,
)
from yuleheights.numeric import FLOAT
from yuleheights.oracle import oracle_moment


def test_small_partitions():
    assert partitions(1) == [(1,)]
    assert partitions(2) == [(2, 0), (0, 1)]
    assert partitions(3) == [(3, 0, 0), (1, 1, 0), (0, 0, 1)]
    assert len(partitions(5)) == 7
    assert len(partitions(10)) == 42


@given(st.integers(1, 12))
def test_partition_weights(m):
    parts = partitions(m)
    assert len(set(parts)) == len(parts)
    assert all(len(k) == m and sum(i * ki for i, ki in enumerate(k, 1)) == m for k in parts)


def test_frozen_coefficients():
    # monomials of E[U^m]: H1^2 + H2; H1^3 + 3 H1 H2 + 2 H3; fourth order likewise
    assert [c for _, c in coefficient_table(1)] == [1]
    assert [c for _, c in coefficient_table(2)] == [1, 1]
    assert [c for _, c in coefficient_table(3)] == [1, 3, 2]
    assert [c for _, c in coefficient_table(4)] == [1, 6, 8, 3, 6]


def test_coefficient_boundaries():
    assert coefficient((0, 0)) == 0
    assert coefficient((1, -1)) == 0
    assert coefficient((5, 0, 0)) == 1
    assert coefficient((1, 1, 0)) == coefficient((1, 1)) == 3


@pytest.mark.parametrize("m", range(1, 11))
def test_coefficients_sum_to_factorial(m):
    assert sum(c for _, c in coefficient_table(m)) == math.factorial(m)


def test_moment_order_checks():
    with pytest.raises(ValueError):
        partitions(0)
    with pytest.raises(ValueError):
        height_moment(5, 21)
    with pytest.raises(ValueError):
        tau_moment(1, 1)
    with pytest.raises(ValueError):
        shared_moment(1, 1)


def test_frozen_moment_values():
    assert height_moment(1, 5) == 120
    assert [height_moment(4, m) for m in (1, 2, 3)] == [Fraction(25, 12), Fraction(415, 72), Fraction(5845, 288)]
    assert tau_moment(2, 1) == Fraction(1, 2) and tau_moment(2, 2) == Fraction(1, 2)
    assert [tau_moment(5, m) for m in (1, 2, 3)] == [Fraction(37, 40), Fraction(1579, 1200), Fraction(58973, 24000)]
    assert [shared_moment(5, m) for m in (1, 2, 3)] == [Fraction(163, 120), Fraction(455, 144), Fraction(5897, 576)]


@given(st.integers(1, 200))
def test_height_low_moments(n):
    h1, h2 = harmonic(n), harmonic(n, 2)
    assert height_moment(n, 1) == h1
    assert height_moment(n, 2) == h1 * h1 + h2
    assert height_moment(n, 2) >= height_moment(n, 1) ** 2


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 200))
def test_tau_and_shared_match_registry(n):
    assert tau_moment(n, 1) == statistic(S.E_TAU, n)
    assert tau_moment(n, 2) == statistic(S.E_TAU2, n)
    assert shared_moment(n, 1) == statistic(S.E_SHARED, n)
    assert shared_moment(n, 2) == statistic(S.E_SHARED2, n)


@pytest.mark.parametrize("n", range(2, 9))
@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_engine_matches_enumeration(n, m):
    assert height_moment(n, m) == oracle_moment("height", n, m)
    assert tau_moment(n, m) == oracle_moment("tau", n, m)
    assert shared_moment(n, m) == oracle_moment("shared", n, m)


@pytest.mark.parametrize("n", [2, 3, 10, 60])
@pytest.mark.parametrize("m", range(1, 8))
def test_moments_positive(n, m):
    assert tau_moment(n, m) > 0
    assert shared_moment(n, m) > 0


def test_float_mode_agrees():
    for n in (3, 40, 400):
        for f in (height_moment, tau_moment, shared_moment):
            assert f(n, 3, FLOAT) == pytest.approx(float(f(n, 3)), rel=1e-12)


def test_laplace_examples():
    assert laplace_height(7, 0) == 1.0
    assert laplace_tau(7, 0) == pytest.approx(1.0, rel=1e-14)
    for x in (0.3, 2.0, 5.0):
        assert laplace_tau(2, x) == pytest.approx(2 / (2 + x), rel=1e-13)
    assert laplace_tau(2, Fraction(1, 2), "rational") == Fraction(4, 5)
    with pytest.raises(ValueError):
        laplace_tau(5, 1)
    assert 0 < laplace_tau(30, 3.0) <= 1


@pytest.mark.parametrize("n", [1, 5, 20, 50])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_numeric_derivatives_of_height_transform(n, m):
    approx = laplace_moment(lambda x: laplace_height(n, x), m)
    assert approx == pytest.approx(float(height_moment(n, m)), rel=1e-3)


@pytest.mark.parametrize("n", [2, 5, 30])
def test_numeric_derivative_of_tau_transform(n):
    approx = laplace_moment(lambda x: laplace_tau(n, x), 1)
    assert approx == pytest.approx(float(tau_moment(n, 1)), rel=1e-5)
    assert laplace_moment(lambda x: laplace_tau(n, x), 2) == pytest.approx(float(tau_moment(n, 2)), rel=1e-3)
