"""Exact first- and second-moment formulas for Yule tree heights.

Every statistic is a rational function of ``n``, ``H_{n,1}`` and ``H_{n,2}``.
The expressions are the fully expanded exact forms, not leading-order
approximations, so rational mode reproduces them without error and the
identities between them hold exactly.

Notation used in docstrings: ``U`` tree height, ``tau`` coalescent time of a
uniformly drawn tip pair, ``C = E[tau | tree]`` its conditional expectation
given the realized tree, ``U - tau`` the shared path length.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .harmonic import HarmonicCache, default_cache
from .numeric import FLOAT, RATIONAL, Surd, UndefinedAtN, resolve_mode

__all__ = [
    "StatisticId",
    "Formula",
    "REGISTRY",
    "statistic",
    "all_statistics",
    "asymptote",
    "pair_coalescent_pmf",
    "indicator_second_moment",
    "indicator_cross_moment",
    "indicator_variance",
    "cophenetic_index",
]


class StatisticId(str, enum.Enum):
    E_U = "e_u"
    E_U2 = "e_u_sq"
    E_TAU = "e_tau"
    E_TAU2 = "e_tau_sq"
    E_SHARED = "e_shared"
    E_U_SHARED = "e_u_shared"
    E_U_SHARED_COND = "e_u_shared_cond"
    E_SHARED2 = "e_shared_sq"
    E_U_TAU = "e_u_tau"
    E_CONDSHARED2 = "e_cond_shared_sq"
    E_CONDTAU2 = "e_cond_tau_sq"
    E_TAURESID2 = "e_tau_resid_sq"
    VAR_TAU = "var_tau"
    VAR_CONDTAU = "var_cond_tau"
    VAR_SHARED = "var_shared"
    VAR_CONDSHARED = "var_cond_shared"
    COV_TAU_CONDTAU = "cov_tau_cond_tau"
    CORR_TAU_CONDTAU = "corr_tau_cond_tau"
    COV_SHARED_CONDSHARED = "cov_shared_cond_shared"
    CORR_SHARED_CONDSHARED = "corr_shared_cond_shared"
    COV_SHARED_TAURESID = "cov_shared_tau_resid"
    CORR_SHARED_TAURESID = "corr_shared_tau_resid"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, name: str) -> "StatisticId":
        try:
            return cls(name.lower())
        except ValueError:
            try:
                return cls[name.upper()]
            except KeyError:
                raise ValueError(f"unknown statistic {name!r}") from None


S = StatisticId


@dataclass(frozen=True)
class Formula:
    expr: Callable  # (n, H1, H2, one) -> value; correlations handled apart
    asymptote: Callable[[], float] | None
    description: str
    min_n: int = 2


# -- exact expressions --------------------------------------------------------
# Each takes n (int), h1 = H_{n,1}, h2 = H_{n,2} and `one` (Fraction(1) or 1.0)
# so the same code serves both numeric modes.


def _e_u(n, h1, h2, one):
    return one * h1


def _e_u2(n, h1, h2, one):
    return h1**2 + h2


def _e_tau(n, h1, h2, one):
    return one * (n + 1) / (n - 1) * h1 - one * 2 * n / (n - 1)


def _e_tau2(n, h1, h2, one):
    return one * (n + 1) / (n - 1) * ((h1 - 2) ** 2 + h2) - one * 4 / (n - 1)


def _e_shared(n, h1, h2, one):
    return 2 * (n - h1) / (n - 1)


def _e_u_shared(n, h1, h2, one):
    return one * 2 * n / (n - 1) * (h1 + h2 - 1 - h1**2 / n)


def _e_shared2(n, h1, h2, one):
    return (one * (4 * n + 2) * h2 - 2 * h1**2 - 4 * h1) / (n - 1)


def _e_u_tau(n, h1, h2, one):
    return one * (n + 1) / (n - 1) * (h1**2 - h2) - one * 2 * n / (n - 1) * (h1 - 1)


def _e_cond_shared2(n, h1, h2, one):
    num = (4 * n**3 * h2 + 9 * n**3
           - 24 * n**2 * h1 - 24 * n**2 * h2 + 34 * n**2
           + 12 * n * h1**2 - 16 * n * h2 + 13 * n
           - 8 * h1)
    return one * num / (3 * n * (n - 1) ** 2)


def _e_cond_tau2(n, h1, h2, one):
    q = one / (n - 1)
    return (h1**2 - 4 * h1 - one * 5 * h2 / 3 + 7
            + one * 4 * h1**2 / n
            - 12 * h1 * q - one * 28 * h2 / 3 * q + one * 64 / 3 * q
            + 8 * h1**2 * q**2 - 8 * h1 * q**2 - 12 * h2 * q**2 + one * 56 / 3 * q**2
            - one * 4 * h1**2 / n * q**2 - one * 8 * h1 / (3 * n) * q**2)


def _e_tau_resid2(n, h1, h2, one):
    q = one / (n - 1)
    return (one * 8 / 3 * h2 - 3
            - 2 * h1**2 * q + 4 * h1 * q + one * 34 / 3 * h2 * q - one * 52 / 3 * q
            - 4 * h1**2 * q**2 + 8 * h1 * q**2 + 12 * h2 * q**2 - one * 56 / 3 * q**2
            + one * 8 * h1 / (3 * n) * q**2)


def _var_tau(n, h1, h2, one):
    return (one * (n + 1) / (n - 1) * h2
            - one * 2 * (n + 1) / (n - 1) ** 2 * h1**2
            + one * 4 * (n + 1) / (n - 1) ** 2 * h1
            - one * 4 / (n - 1)
            - one * 4 / (n - 1) ** 2)


def _var_cond_tau(n, h1, h2, one):
    q = one / (n - 1)
    return (3 - one * 5 / 3 * h2
            - one * 28 / 3 * h2 * q + one * 40 / 3 * q
            - 12 * h2 * q**2 + one * 44 / 3 * q**2
            - one * 8 * h1 / (3 * n) * q**2)


def _var_shared(n, h1, h2, one):
    q = one / (n - 1)
    return (4 * (h2 - 1) + 6 * h2 * q - 2 * h1**2 * q
            + (4 * h1 - 8) * q - 4 * (h1 - 1) ** 2 * q**2)


def _var_cond_shared(n, h1, h2, one):
    q = one / (n - 1)
    return (one * 4 / 3 * h2 - 1
            - one * 16 / 3 * h2 * q + one * 28 / 3 * q
            - 12 * h2 * q**2 + one * 44 / 3 * q**2
            - one * 8 * h1 / (3 * n) * q**2)


# covariances follow from conditioning identities rather than new algebra


def _cov_tau_cond_tau(n, h1, h2, one):
    return _var_cond_tau(n, h1, h2, one)


def _cov_shared_cond_shared(n, h1, h2, one):
    return _var_cond_shared(n, h1, h2, one)


def _cov_shared_tau_resid(n, h1, h2, one):
    return -_e_tau_resid2(n, h1, h2, one)


# correlations: (covariance, first variance, second variance)
_CORRELATIONS = {
    S.CORR_TAU_CONDTAU: (_cov_tau_cond_tau, _var_tau, _var_cond_tau),
    S.CORR_SHARED_CONDSHARED: (_cov_shared_cond_shared, _var_shared, _var_cond_shared),
    # tau - C has mean zero, so its second moment is its variance
    S.CORR_SHARED_TAURESID: (_cov_shared_tau_resid, _var_shared, _e_tau_resid2),
}

_PI2 = math.pi**2

REGISTRY: dict[StatisticId, Formula] = {
    S.E_U: Formula(_e_u, None, "E[U]"),
    S.E_U2: Formula(_e_u2, None, "E[U^2]"),
    S.E_TAU: Formula(_e_tau, None, "E[tau]"),
    S.E_TAU2: Formula(_e_tau2, None, "E[tau^2]"),
    S.E_SHARED: Formula(_e_shared, lambda: 2.0, "E[U - tau]"),
    S.E_U_SHARED: Formula(_e_u_shared, None, "E[U (U - tau)]"),
    S.E_U_SHARED_COND: Formula(_e_u_shared, None, "E[U (U - E[tau|Y])]"),
    S.E_SHARED2: Formula(_e_shared2, lambda: 2 * _PI2 / 3, "E[(U - tau)^2]"),
    S.E_U_TAU: Formula(_e_u_tau, None, "E[U tau]"),
    S.E_CONDSHARED2: Formula(_e_cond_shared2, lambda: 2 * _PI2 / 9 + 3, "E[(U - E[tau|Y])^2]"),
    S.E_CONDTAU2: Formula(_e_cond_tau2, None, "E[E[tau|Y]^2]"),
    S.E_TAURESID2: Formula(_e_tau_resid2, lambda: 4 * _PI2 / 9 - 3, "E[(tau - E[tau|Y])^2]"),
    S.VAR_TAU: Formula(_var_tau, lambda: _PI2 / 6, "var(tau)"),
    S.VAR_CONDTAU: Formula(_var_cond_tau, lambda: 3 - 5 * _PI2 / 18, "var(E[tau|Y])"),
    S.VAR_SHARED: Formula(_var_shared, lambda: 2 * _PI2 / 3 - 4, "var(U - tau)"),
    S.VAR_CONDSHARED: Formula(_var_cond_shared, lambda: 2 * _PI2 / 9 - 1, "var(U - E[tau|Y])"),
    S.COV_TAU_CONDTAU: Formula(_cov_tau_cond_tau, lambda: 3 - 5 * _PI2 / 18,
                               "cov(tau, E[tau|Y])"),
    S.CORR_TAU_CONDTAU: Formula(None, lambda: math.sqrt(18 / _PI2 - 5 / 3),
                                "corr(tau, E[tau|Y])"),
    S.COV_SHARED_CONDSHARED: Formula(_cov_shared_cond_shared, lambda: 2 * _PI2 / 9 - 1,
                                     "cov(U - tau, U - E[tau|Y])"),
    S.CORR_SHARED_CONDSHARED: Formula(
        None, lambda: math.sqrt((2 * _PI2 / 9 - 1) / (2 * _PI2 / 3 - 4)),
        "corr(U - tau, U - E[tau|Y])"),
    S.COV_SHARED_TAURESID: Formula(_cov_shared_tau_resid, lambda: 3 - 4 * _PI2 / 9,
                                   "cov(U - tau, tau - E[tau|Y])"),
    S.CORR_SHARED_TAURESID: Formula(
        None, lambda: -math.sqrt((4 * _PI2 / 9 - 3) / (2 * _PI2 / 3 - 4)),
        "corr(U - tau, tau - E[tau|Y])"),
}


def _correlation(sid: StatisticId, n: int, h1, h2, one):
    cov_f, var_a, var_b = _CORRELATIONS[sid]
    cov = cov_f(n, h1, h2, one)
    va, vb = var_a(n, h1, h2, one), var_b(n, h1, h2, one)
    if va == 0 or vb == 0:
        raise UndefinedAtN(f"{sid} is undefined at n={n}: a variance factor is zero")
    if isinstance(one, Fraction):
        sign = -1 if cov < 0 else 1
        return Surd(cov * cov / (va * vb), sign)
    return cov / math.sqrt(va * vb)


def statistic(sid, n: int, mode: str | None = None, cache: HarmonicCache | None = None):
    """Exact value of a registered statistic at tip count ``n``.

    Rational mode returns a ``Fraction`` (a :class:`~yuleheights.numeric.Surd`
    for correlations).  Raises :class:`UndefinedAtN` where a correlation's
    variance factor vanishes.
    """
    sid = sid if isinstance(sid, StatisticId) else StatisticId.parse(sid)
    formula = REGISTRY[sid]
    if n < formula.min_n:
        raise ValueError(f"{sid} needs n >= {formula.min_n}, got {n}")
    mode = resolve_mode(n, mode)
    cache = cache or default_cache
    one = Fraction(1) if mode == RATIONAL else 1.0
    h1, h2 = cache.get(n, 1, mode), cache.get(n, 2, mode)
    if sid in _CORRELATIONS:
        return _correlation(sid, n, h1, h2, one)
    return formula.expr(n, h1, h2, one)


def all_statistics(n: int, mode: str | None = None) -> dict:
    """Every statistic at ``n``; undefined entries map to ``None``."""
    out = {}
    for sid in StatisticId:
        try:
            out[sid] = statistic(sid, n, mode)
        except UndefinedAtN:
            out[sid] = None
    return out


def asymptote(sid) -> float | None:
    """Finite large-n limit, or ``None`` where the statistic grows like log n."""
    sid = sid if isinstance(sid, StatisticId) else StatisticId.parse(sid)
    limit = REGISTRY[sid].asymptote
    return None if limit is None else limit()


# -- coalescence event law and indicator moments --------------------------------


def _check_event(n: int, k: int) -> None:
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if not 1 <= k <= n - 1:
        raise ValueError(f"event index must lie in 1..{n - 1}, got {k}")


def _one(mode):
    return Fraction(1) if mode in (None, RATIONAL) else 1.0


def pair_coalescent_pmf(n: int, k: int, mode: str | None = RATIONAL):
    """``P(kappa = k) = 2(n+1) / ((n-1)(k+1)(k+2))``.

    ``kappa`` is the speciation event, counted from the origin, at which a
    uniformly drawn tip pair coalesces.
    """
    _check_event(n, k)
    return _one(mode) * 2 * (n + 1) / ((n - 1) * (k + 1) * (k + 2))


def _binom2(x: int) -> int:
    return x * (x - 1) // 2


def _same_pair(n: int, k: int, one):
    # both draws are the same pair
    return pair_coalescent_pmf(n, k, None) * one


def _shared_tip_same_event(n: int, k: int, one):
    # P(both pairs coalesce at event k | the pairs share exactly one tip)
    return one * 4 * (n + 1) * (n - (k + 1)) / ((n - 1) * (n - 2) * (k + 1) * (k + 2) * (k + 3))


def _disjoint_same_event(n: int, k: int, one):
    # P(both pairs coalesce at event k | the pairs are disjoint)
    return (one * 16 * (n + 1) * (n - (k + 1)) * (n - (k + 2))
            / ((n - 1) * (n - 2) * (n - 3) * (k + 1) * (k + 2) * (k + 3) * (k + 4)))


def _shared_tip_two_events(n: int, k1: int, k2: int, one):
    # P(first pair at k2, second at k1 | the pairs share exactly one tip)
    return one * 4 * (n + 1) * (n + 2) / ((n - 1) * (n - 2) * (k1 + 1) * (k1 + 2) * (k2 + 2) * (k2 + 3))


def _disjoint_two_events(n: int, k1: int, k2: int, one):
    # P(first pair at k2, second at k1 | the pairs are disjoint)
    return (one * 4 * (n + 1) * (n + 2) * (n * (k2 + 6) - 5 * k2 - 14)
            / ((n - 1) * (n - 2) * (n - 3) * (k1 + 1) * (k1 + 2) * (k2 + 2) * (k2 + 3) * (k2 + 4)))


def _draw_weights(n: int, one):
    """Probabilities that two independent pair draws coincide / share a tip / are disjoint."""
    c = _binom2(n)
    return one / c, one * 2 * (n - 2) / c, one * _binom2(n - 2) / c


def _mixture_second_moment(n: int, k: int, one):
    same, shared, disjoint = _draw_weights(n, one)
    total = same * _same_pair(n, k, one)
    if n >= 3:
        total += shared * _shared_tip_same_event(n, k, one)
    if n >= 4:
        total += disjoint * _disjoint_same_event(n, k, one)
    return total


def _mixture_cross_moment(n: int, k1: int, k2: int, one):
    _, shared, disjoint = _draw_weights(n, one)
    total = shared * _shared_tip_two_events(n, k1, k2, one)
    if n >= 4:
        total += disjoint * _disjoint_two_events(n, k1, k2, one)
    return total


def indicator_second_moment(n: int, k: int, mode: str | None = RATIONAL):
    """``E[E[1_k | tree]**2]`` with ``E[1_k | tree] = s_k / C(n, 2)``."""
    _check_event(n, k)
    one = _one(mode)
    a = (n - 1) ** 2 * (k + 1) * (k + 2)
    return (one * 16 * n * (n + 1) / (a * (k + 3) * (k + 4))
            - one * 16 * (n + 1) / (a * (k + 3))
            + one * 80 * (n + 1) / (a * (k + 3) * (k + 4))
            + one * 4 * (n + 1) / (a * n)
            - one * 32 * (n + 1) / (a * n * (k + 3))
            + one * 96 * (n + 1) / (a * n * (k + 3) * (k + 4)))


def indicator_cross_moment(n: int, k1: int, k2: int, mode: str | None = RATIONAL):
    """``E[E[1_{k2} | tree] E[1_{k1} | tree]]`` for ``k1 < k2``."""
    _check_event(n, k1)
    _check_event(n, k2)
    if not k1 < k2:
        raise ValueError(f"need k1 < k2, got k1={k1}, k2={k2}")
    one = _one(mode)
    a = (n - 1) ** 2 * (k1 + 1) * (k1 + 2) * (k2 + 1) * (k2 + 2)
    b3, b4 = k2 + 3, (k2 + 3) * (k2 + 4)
    return (one * 4 * (n + 1) ** 2 / a
            - one * 24 * n * (n + 1) / (a * b4)
            + one * 32 * (n + 1) / (a * b3)
            - one * 120 * (n + 1) / (a * b4)
            - one * 8 * (n + 1) / (a * n)
            + one * 64 * (n + 1) / (a * n * b3)
            - one * 144 * (n + 1) / (a * n * b4))


def indicator_variance(n: int, k: int, mode: str | None = RATIONAL):
    """``var(E[1_k | tree])``; vanishes at ``k = n - 1``."""
    _check_event(n, k)
    one = _one(mode)
    num = 4 * (n + 1) * (n - (k + 1)) * (n * (3 * k**2 + 5 * k - 4) - (k**3 + k**2 + 2 * k + 8))
    den = n * (n - 1) ** 2 * (k + 1) ** 2 * (k + 2) ** 2 * (k + 3) * (k + 4)
    return one * num / den


def cophenetic_index(height: float, cond_tau: float, n: int) -> float:
    """Total cophenetic index of a tree with branch lengths: ``C(n,2) (U - E[tau|tree])``."""
    return _binom2(n) * (height - cond_tau)
