import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from yuleheights.closed_forms import (
    REGISTRY, StatisticId as S, all_statistics, asymptote, cophenetic_index, indicator_cross_moment,
    indicator_second_moment, indicator_variance, pair_coalescent_pmf, statistic,
)
from yuleheights.numeric import FLOAT, Surd, UndefinedAtN, format_value

# values at small n, cross-checked against exhaustive enumeration
FROZEN = {
    2: {"e_u": "3/2", "e_u_sq": "7/2", "e_tau": "1/2", "e_tau_sq": "1/2", "e_shared": "1",
        "e_shared_sq": "2", "e_u_tau": "1", "e_cond_shared_sq": "2", "e_tau_resid_sq": "0",
        "var_tau": "1/4", "corr_tau_cond_tau": "1"},
    3: {"e_u": "11/6", "e_u_sq": "85/18", "e_tau": "2/3", "e_tau_sq": "7/9", "e_shared": "7/6",
        "e_u_shared": "29/9", "e_u_shared_cond": "29/9", "e_shared_sq": "5/2", "e_u_tau": "3/2",
        "e_cond_shared_sq": "43/18", "e_cond_tau_sq": "2/3", "e_tau_resid_sq": "1/9", "var_tau": "1/3",
        "var_cond_tau": "2/9", "var_shared": "41/36", "var_cond_shared": "37/36",
        "cov_tau_cond_tau": "2/9", "corr_tau_cond_tau": "sqrt(2/3)", "cov_shared_cond_shared": "37/36",
        "corr_shared_cond_shared": "sqrt(37/41)", "cov_shared_tau_resid": "-1/9",
        "corr_shared_tau_resid": "-sqrt(4/41)"},
    4: {"e_tau": "29/36", "e_tau_sq": "227/216", "e_shared_sq": "155/54", "e_cond_shared_sq": "871/324",
        "e_cond_tau_sq": "563/648", "e_tau_resid_sq": "59/324", "var_tau": "521/1296",
        "var_cond_tau": "95/432", "var_shared": "401/324", "var_cond_shared": "19/18",
        "corr_shared_tau_resid": "-sqrt(59/401)"},
}


def test_registry_is_complete():
    assert len(S) == 22 and set(REGISTRY) == set(S)
    assert S.parse("var_tau") is S.VAR_TAU and S.parse("VAR_TAU") is S.VAR_TAU
    with pytest.raises(ValueError):
        S.parse("nope")


@pytest.mark.parametrize("n", sorted(FROZEN))
def test_frozen_values(n):
    for name, text in FROZEN[n].items():
        assert format_value(statistic(name, n)) == text, name


def test_undefined_only_for_zero_variance():
    with pytest.raises(UndefinedAtN):
        statistic(S.CORR_SHARED_TAURESID, 2)
    assert statistic(S.CORR_TAU_CONDTAU, 2) == 1
    values = all_statistics(2)
    assert [k for k, v in values.items() if v is None] == [S.CORR_SHARED_TAURESID]
    with pytest.raises(ValueError):
        statistic(S.E_U, 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 200))
def test_exact_identities(n):
    v = all_statistics(n)
    assert v[S.VAR_TAU] == v[S.VAR_CONDTAU] + v[S.E_TAURESID2]
    assert v[S.E_TAURESID2] == v[S.E_SHARED2] - v[S.E_CONDSHARED2]
    assert v[S.E_U_TAU] == (v[S.E_U2] + v[S.E_TAU2] - v[S.E_SHARED2]) / 2
    assert v[S.E_U_SHARED] == v[S.E_U_SHARED_COND]
    assert v[S.E_U] - v[S.E_TAU] == v[S.E_SHARED]
    assert v[S.COV_TAU_CONDTAU] == v[S.VAR_CONDTAU]
    assert v[S.COV_SHARED_CONDSHARED] == v[S.VAR_CONDSHARED]
    assert v[S.COV_SHARED_TAURESID] == -v[S.E_TAURESID2]


@pytest.mark.parametrize("n", [2, 3, 10, 100, 500, 501, 1000, 2500])
def test_variances_nonnegative(n):
    v = all_statistics(n, FLOAT)
    for sid in (S.VAR_TAU, S.VAR_CONDTAU, S.VAR_SHARED, S.VAR_CONDSHARED, S.E_TAURESID2):
        assert v[sid] >= 0


@pytest.mark.parametrize("n", [7, 150, 480])
def test_float_mode_tracks_rational(n):
    for sid in S:
        exact = statistic(sid, n)
        assert statistic(sid, n, FLOAT) == pytest.approx(float(exact), rel=1e-10, abs=1e-13)


def test_asymptotes():
    assert asymptote(S.E_SHARED) == 2.0
    assert asymptote(S.E_U) is None and asymptote(S.E_U_SHARED_COND) is None
    assert asymptote(S.VAR_TAU) == pytest.approx(math.pi**2 / 6)
    assert asymptote(S.E_CONDSHARED2) == pytest.approx(5.19325, abs=1e-5)
    assert asymptote(S.CORR_SHARED_TAURESID) == pytest.approx(-0.733, abs=1e-3)
    finite = [s for s in S if asymptote(s) is not None]
    assert len(finite) == 14


@pytest.mark.parametrize("sid", [s for s in S if asymptote(s) is not None])
def test_monotone_approach_between_grid_ends(sid):
    lim = asymptote(sid)
    assert abs(statistic(sid, 2500) - lim) <= abs(float(statistic(sid, 250)) - lim)


@given(st.integers(2, 500))
def test_pmf_normalized(n):
    assert sum(pair_coalescent_pmf(n, k) for k in range(1, n)) == 1


def test_pmf_values():
    assert pair_coalescent_pmf(2, 1) == 1
    assert pair_coalescent_pmf(4, 1) == Fraction(5, 9)
    with pytest.raises(ValueError):
        pair_coalescent_pmf(4, 4)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 500), st.data())
def test_indicator_variance_consistent(n, data):
    k = data.draw(st.integers(1, n - 1))
    var = indicator_variance(n, k)
    assert var >= 0
    assert var == indicator_second_moment(n, k) - pair_coalescent_pmf(n, k) ** 2


def test_indicator_examples():
    assert indicator_variance(2, 1) == 0
    assert indicator_second_moment(3, 1) == Fraction(4, 9)
    assert all(indicator_variance(n, n - 1) == 0 for n in range(2, 30))
    with pytest.raises(ValueError):
        indicator_cross_moment(5, 3, 3)


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 120))
def test_cross_moments_sum_rule(n):
    # sum over all (k1, k2) of E[w_k1 w_k2] is E[(sum w)^2] = 1
    total = sum(indicator_second_moment(n, k) for k in range(1, n))
    total += 2 * sum(indicator_cross_moment(n, a, b) for a in range(1, n) for b in range(a + 1, n))
    assert total == 1


def test_correlation_types():
    assert isinstance(statistic(S.CORR_TAU_CONDTAU, 9), Surd)
    assert isinstance(statistic(S.CORR_TAU_CONDTAU, 900), float)


def test_cophenetic_index():
    assert cophenetic_index(3.0, 1.0, 4) == 12.0
