"""Exhaustive small-tree ground truth.

Under the Yule process every labeled history (which lineage splits at each
speciation event) is equally likely, and branch lengths are independent of
the topology.  Enumerating the ``(n-1)!`` histories and using exact
exponential moments ``E[T_i**p] = p! / i**p`` therefore gives exact rational
expectations with no randomness involved.

The second half of the module recomputes registry statistics by direct
finite summation over the coalescence event, using only exponential moments
and indicator moments (enumerated, or from the closed forms).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from . import closed_forms as cf
from .closed_forms import StatisticId as S
from .numeric import Surd, UndefinedAtN

__all__ = [
    "ORACLE_MAX_N",
    "LabeledHistory",
    "enumerate_histories",
    "history_pair_counts",
    "oracle_indicator_moments",
    "oracle_moment",
    "oracle_statistic",
    "SUPPORTED",
]

ORACLE_MAX_N = 9


@dataclass(frozen=True)
class LabeledHistory:
    n: int
    choices: tuple[int, ...]  # choices[k-1] in 1..k: lineage split at event k
    probability: Fraction


def _check_range(n: int) -> None:
    if not 2 <= n <= ORACLE_MAX_N:
        raise ValueError(f"oracle enumeration supports 2 <= n <= {ORACLE_MAX_N}, got {n}")


def enumerate_histories(n: int) -> Iterator[LabeledHistory]:
    _check_range(n)
    p = Fraction(1, math.factorial(n - 1))
    for choices in itertools.product(*(range(1, k + 1) for k in range(1, n))):
        yield LabeledHistory(n, choices, p)


def history_pair_counts(history: LabeledHistory) -> list[int]:
    """``s[k-1]``: number of tip pairs whose most recent common ancestor is event k.

    Computed from ancestor paths, pair by pair.
    """
    paths: list[tuple[int, ...]] = [()]
    for k, c in enumerate(history.choices, start=1):
        path = paths.pop(c - 1) + (k,)
        paths += [path, path]
    counts = [0] * (history.n - 1)
    for a, b in itertools.combinations(paths, 2):
        shared = 0
        for x, y in zip(a, b):
            if x != y:
                break
            shared = x
        counts[shared - 1] += 1
    return counts


def _conditional_indicators(history: LabeledHistory) -> list[Fraction]:
    total = history.n * (history.n - 1) // 2
    return [Fraction(s, total) for s in history_pair_counts(history)]


def oracle_indicator_moments(n: int) -> dict:
    """Exact moments of ``w_k = E[1_k | tree]`` by enumeration.

    Returns ``{"mean": {k}, "second": {k}, "cross": {(k1, k2)}, "variance": {k}}``
    with ``k1 < k2``.
    """
    _check_range(n)
    mean = {k: Fraction(0) for k in range(1, n)}
    second = dict(mean)
    cross = {(a, b): Fraction(0) for a in range(1, n) for b in range(a + 1, n)}
    for h in enumerate_histories(n):
        w = _conditional_indicators(h)
        for k in range(1, n):
            mean[k] += h.probability * w[k - 1]
            second[k] += h.probability * w[k - 1] ** 2
        for a, b in cross:
            cross[a, b] += h.probability * w[a - 1] * w[b - 1]
    variance = {k: second[k] - mean[k] ** 2 for k in mean}
    return {"mean": mean, "second": second, "cross": cross, "variance": variance}


# -- exact moments of sums of independent exponentials ---------------------


def _exp_moments(i: int, m: int) -> list[Fraction]:
    return [Fraction(math.factorial(p), i**p) for p in range(m + 1)]


def _sum_moments(rates, m: int) -> list[Fraction]:
    """Raw moments 0..m of a sum of independent Exp(rate) variables."""
    out = [Fraction(1)] + [Fraction(0)] * m
    for i in rates:
        e = _exp_moments(i, m)
        out = [sum((math.comb(p, q) * out[q] * e[p - q] for q in range(p + 1)), Fraction(0))
               for p in range(m + 1)]
    return out


def oracle_moment(kind: str, n: int, m: int) -> Fraction:
    """``E[X**m]`` for ``X`` in ``{"height", "tau", "shared"}`` by enumeration."""
    if kind == "height":
        if n < 1:
            raise ValueError("need n >= 1")
        return _sum_moments(range(1, n + 1), m)[m]
    if kind not in ("tau", "shared"):
        raise ValueError(f"unknown kind {kind!r}")
    _check_range(n)
    if kind == "shared":
        conditional = [_sum_moments(range(1, k + 1), m)[m] for k in range(1, n)]
    else:
        conditional = [_sum_moments(range(k + 1, n + 1), m)[m] for k in range(1, n)]
    total = Fraction(0)
    for h in enumerate_histories(n):
        w = _conditional_indicators(h)
        total += h.probability * sum((wk * ck for wk, ck in zip(w, conditional)), Fraction(0))
    return total


# -- direct-sum recomputation of registry statistics ------------------------

SUPPORTED = frozenset(S)


class _Moments:
    """Exact first/second moments of prefix sums S_k = T_1+..+T_k and
    suffix sums R_k = T_{k+1}+..+T_n, built by direct accumulation."""

    def __init__(self, n: int):
        self.n = n
        s1, s2 = [Fraction(0)], [Fraction(0)]
        for i in range(1, n + 1):
            t1, t2 = Fraction(1, i), Fraction(2, i * i)
            s1.append(s1[-1] + t1)
            s2.append(s2[-1] + 2 * s1[-2] * t1 + t2)
        self.s1, self.s2 = s1, s2  # index k -> E[S_k], E[S_k^2]
        r1, r2 = [Fraction(0)] * (n + 1), [Fraction(0)] * (n + 1)
        for k in range(n - 1, -1, -1):
            t1, t2 = Fraction(1, k + 1), Fraction(2, (k + 1) ** 2)
            r1[k] = r1[k + 1] + t1
            r2[k] = r2[k + 1] + 2 * r1[k + 1] * t1 + t2
        self.r1, self.r2 = r1, r2  # index k -> E[R_k], E[R_k^2]

    def ss(self, a: int, b: int) -> Fraction:
        """E[S_a S_b] for a <= b."""
        return self.s2[a] + self.s1[a] * (self.s1[b] - self.s1[a])

    def rr(self, a: int, b: int) -> Fraction:
        """E[R_a R_b] for a <= b."""
        return self.r2[b] + (self.r1[a] - self.r1[b]) * self.r1[b]


def _indicator_source(n: int, source: str):
    if source == "enumeration":
        mom = oracle_indicator_moments(n)
        return mom["mean"], mom["second"], mom["cross"]
    if source != "closed_form":
        raise ValueError(f"unknown indicator source {source!r}")
    mean = {k: cf.pair_coalescent_pmf(n, k) for k in range(1, n)}
    second = {k: cf.indicator_second_moment(n, k) for k in range(1, n)}
    cross = {(a, b): cf.indicator_cross_moment(n, a, b)
             for a in range(1, n) for b in range(a + 1, n)}
    return mean, second, cross


def _direct_values(n: int, source: str) -> dict:
    mom = _Moments(n)
    pi, second, cross = _indicator_source(n, source)
    ks = range(1, n)
    e_u = mom.s1[n]
    e_u2 = mom.s2[n]
    e_shared = sum((pi[k] * mom.s1[k] for k in ks), Fraction(0))
    e_shared2 = sum((pi[k] * mom.s2[k] for k in ks), Fraction(0))
    e_tau = sum((pi[k] * mom.r1[k] for k in ks), Fraction(0))
    e_tau2 = sum((pi[k] * mom.r2[k] for k in ks), Fraction(0))
    e_u_tau = sum((pi[k] * (mom.s1[k] * mom.r1[k] + mom.r2[k]) for k in ks), Fraction(0))
    e_u_shared = sum((pi[k] * (mom.s2[k] + mom.s1[k] * mom.r1[k]) for k in ks), Fraction(0))
    e_cs2 = sum((second[k] * mom.s2[k] for k in ks), Fraction(0))
    e_ct2 = sum((second[k] * mom.r2[k] for k in ks), Fraction(0))
    for (a, b), x in cross.items():
        e_cs2 += 2 * x * mom.ss(a, b)
        e_ct2 += 2 * x * mom.rr(a, b)
    # E[tau C] = E[C^2] and E[(U - tau)(U - C)] = E[(U - C)^2] by conditioning on the tree
    v = {
        S.E_U: e_u,
        S.E_U2: e_u2,
        S.E_TAU: e_tau,
        S.E_TAU2: e_tau2,
        S.E_SHARED: e_shared,
        S.E_U_SHARED: e_u_shared,
        S.E_U_SHARED_COND: e_u_shared,
        S.E_SHARED2: e_shared2,
        S.E_U_TAU: e_u_tau,
        S.E_CONDSHARED2: e_cs2,
        S.E_CONDTAU2: e_ct2,
        S.E_TAURESID2: e_tau2 - e_ct2,
        S.VAR_TAU: e_tau2 - e_tau**2,
        S.VAR_CONDTAU: e_ct2 - e_tau**2,
        S.VAR_SHARED: e_shared2 - e_shared**2,
        S.VAR_CONDSHARED: e_cs2 - e_shared**2,
        S.COV_TAU_CONDTAU: e_ct2 - e_tau**2,
        S.COV_SHARED_CONDSHARED: e_cs2 - e_shared**2,
        S.COV_SHARED_TAURESID: e_cs2 - e_shared2,
    }
    return v


def _corr(cov: Fraction, va: Fraction, vb: Fraction, sid, n) -> Surd:
    if va == 0 or vb == 0:
        raise UndefinedAtN(f"{sid} is undefined at n={n}")
    return Surd(cov * cov / (va * vb), -1 if cov < 0 else 1)


def oracle_statistic(sid, n: int, indicators: str = "closed_form"):
    """Registry statistic recomputed by direct summation over coalescence events.

    ``indicators="closed_form"`` works for any ``n >= 2``;
    ``indicators="enumeration"`` is limited to the enumeration range.
    """
    sid = sid if isinstance(sid, S) else S.parse(sid)
    if sid not in SUPPORTED:
        raise ValueError(f"no direct-sum route for {sid}")
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    v = _direct_values(n, indicators)
    if sid == S.CORR_TAU_CONDTAU:
        return _corr(v[S.COV_TAU_CONDTAU], v[S.VAR_TAU], v[S.VAR_CONDTAU], sid, n)
    if sid == S.CORR_SHARED_CONDSHARED:
        return _corr(v[S.COV_SHARED_CONDSHARED], v[S.VAR_SHARED], v[S.VAR_CONDSHARED], sid, n)
    if sid == S.CORR_SHARED_TAURESID:
        return _corr(v[S.COV_SHARED_TAURESID], v[S.VAR_SHARED], v[S.E_TAURESID2], sid, n)
    return v[sid]


def oracle_statistics(n: int, indicators: str = "closed_form") -> dict:
    """All statistics at ``n`` from one pass; undefined correlations map to ``None``."""
    v = _direct_values(n, indicators)
    out = dict(v)
    for sid, parts in (
        (S.CORR_TAU_CONDTAU, (S.COV_TAU_CONDTAU, S.VAR_TAU, S.VAR_CONDTAU)),
        (S.CORR_SHARED_CONDSHARED, (S.COV_SHARED_CONDSHARED, S.VAR_SHARED, S.VAR_CONDSHARED)),
        (S.CORR_SHARED_TAURESID, (S.COV_SHARED_TAURESID, S.VAR_SHARED, S.E_TAURESID2)),
    ):
        try:
            out[sid] = _corr(*(v[p] for p in parts), sid, n)
        except UndefinedAtN:
            out[sid] = None
    return out
