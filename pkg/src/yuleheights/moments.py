"""Moments of the tree height, the pair coalescent time and the shared path.

The m-th moment of a Yule tree height is a polynomial in the generalized
harmonic numbers ``H_{n,1}, ..., H_{n,m}``, one monomial per integer
partition of ``m`` written as a multiplicity vector ``k`` (``sum i*k_i = m``),
weighted by an integer coefficient ``c_k`` defined by a recursion on ``k``.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from typing import Iterator

from .harmonic import HarmonicCache, b_factor, default_cache
from .numeric import FLOAT, RATIONAL, convert, resolve_mode

__all__ = [
    "M_CAP",
    "partitions",
    "coefficient",
    "coefficient_table",
    "height_moment",
    "tau_moment",
    "shared_moment",
    "laplace_height",
    "laplace_tau",
    "laplace_moment",
]

M_CAP = 20

_coef_memo: dict[tuple[int, ...], int] = {}
_coef_lock = threading.Lock()


def _check_m(m: int, m_cap: int) -> None:
    if m < 1:
        raise ValueError(f"moment order must be >= 1, got {m}")
    if m > m_cap:
        raise ValueError(f"moment order {m} exceeds cap {m_cap}")


def _canonical(k) -> tuple[int, ...]:
    k = tuple(k)
    end = len(k)
    while end and k[end - 1] == 0:
        end -= 1
    return k[:end]


def _weight(k) -> int:
    return sum(i * ki for i, ki in enumerate(k, start=1))


def partitions(m: int, m_cap: int = M_CAP) -> list[tuple[int, ...]]:
    """All multiplicity vectors of length ``m`` with ``sum i*k_i = m``.

    Ordered so that ``(m, 0, ..., 0)`` comes first and ``(0, ..., 0, 1)`` last
    (reverse lexicographic on the vector).
    """
    _check_m(m, m_cap)
    out = []

    def rec(i: int, remaining: int, tail: tuple[int, ...]) -> Iterator:
        # choose k_i for i = m, m-1, ..., 1; k_1 absorbs the remainder
        if i == 1:
            out.append((remaining,) + tail)
            return
        for ki in range(remaining // i + 1):
            rec(i - 1, remaining - i * ki, (ki,) + tail)

    rec(m, m, ())
    out.sort(reverse=True)
    return out


def coefficient(k) -> int:
    """Integer weight ``c_k`` of the monomial ``prod_i H_{n,i}**k_i``.

    ``c_k = c_(k - e_1) + sum_{j=1}^{m-1} j (k_j + 1) c_(k + e_j - e_{j+1})``
    with ``c = 0`` for the zero vector or any negative entry and ``c = 1``
    for ``(k_1, 0, ...)`` with ``k_1 >= 1``.
    """
    k = tuple(k)
    if any(ki < 0 for ki in k):
        return 0
    key = _canonical(k)
    if not key:
        return 0
    if len(key) == 1:
        return 1
    cached = _coef_memo.get(key)
    if cached is not None:
        return cached
    m = _weight(key)
    # pad so that the e_{j+1} shift for j = m-1 stays in range
    frame = list(key) + [0] * (m - len(key))
    down = frame.copy()
    down[0] -= 1
    total = coefficient(down)
    for j in range(1, m):
        if frame[j] == 0:
            continue  # k_{j+1} - 1 < 0
        shifted = frame.copy()
        shifted[j - 1] += 1
        shifted[j] -= 1
        total += j * (frame[j - 1] + 1) * coefficient(shifted)
    with _coef_lock:
        _coef_memo[key] = total
    return total


def coefficient_table(m: int, m_cap: int = M_CAP) -> list[tuple[tuple[int, ...], int]]:
    return [(k, coefficient(k)) for k in partitions(m, m_cap)]


def _poly(m: int, values: list, one, m_cap: int):
    """``sum_k c_k prod_i values[i-1]**k_i`` over partitions of ``m``."""
    total = one * 0
    for k, c in coefficient_table(m, m_cap):
        term = one * c
        for i, ki in enumerate(k, start=1):
            if ki:
                term *= values[i - 1] ** ki
        total += term
    return total


def _harmonics(n: int, m: int, mode: str, cache: HarmonicCache) -> list:
    return [cache.get(n, i, mode) for i in range(1, m + 1)]


def _unit(mode: str):
    return Fraction(1) if mode == RATIONAL else 1.0


def height_moment(n: int, m: int, mode: str | None = None, *, m_cap: int = M_CAP,
                  cache: HarmonicCache | None = None):
    """``E[U**m]`` for a Yule tree with ``n`` tips."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    _check_m(m, m_cap)
    mode = resolve_mode(n, mode)
    cache = cache or default_cache
    return _poly(m, _harmonics(n, m, mode, cache), _unit(mode), m_cap)


def tau_moment(n: int, m: int, mode: str | None = None, *, m_cap: int = M_CAP,
               cache: HarmonicCache | None = None):
    """``E[tau**m]``, tau the coalescent time of a uniformly drawn tip pair.

    Odd-order harmonic numbers enter shifted by ``-2``.
    """
    if n < 2:
        raise ValueError(f"a tip pair needs n >= 2, got {n}")
    _check_m(m, m_cap)
    mode = resolve_mode(n, mode)
    cache = cache or default_cache
    one = _unit(mode)
    h = _harmonics(n, m, mode, cache)
    shifted = [hi - 2 if i % 2 == 1 else hi for i, hi in enumerate(h, start=1)]
    sign = 1 if m % 2 == 1 else -1
    lead = one * (sign * 2 * math.factorial(m)) / (n - 1)
    return lead + one * (n + 1) / (n - 1) * _poly(m, shifted, one, m_cap)


def shared_moment(n: int, m: int, mode: str | None = None, *, m_cap: int = M_CAP,
                  cache: HarmonicCache | None = None):
    """``E[(U - tau)**m]``, moments of the path length shared by a tip pair.

    Given the coalescence event ``j`` the shared path is ``T_1 + ... + T_j``,
    so this mixes the height moments of a ``j``-tip tree over the law of
    the coalescence event.  No ``(-1)**m`` prefactor: the quantity is
    nonnegative.
    """
    if n < 2:
        raise ValueError(f"a tip pair needs n >= 2, got {n}")
    _check_m(m, m_cap)
    mode = resolve_mode(n, mode)
    cache = cache or default_cache
    one = _unit(mode)
    inner = one * 0
    for j in range(1, n):
        inner += _poly(m, _harmonics(j, m, mode, cache), one, m_cap) / ((j + 1) * (j + 2))
    return one * 2 * (n + 1) / (n - 1) * inner


def laplace_height(n: int, x, mode: str = FLOAT):
    """``E[exp(-x U)] = b_{n,x}``; finite for ``x > -1``."""
    return b_factor(n, x, mode)


def laplace_tau(n: int, x, mode: str = FLOAT):
    """``E[exp(-x tau)] = (2 - (n+1)(x+1) b_{n,x}) / ((n-1)(x-1))``.

    The removable singularity at ``x = 1`` is rejected, not filled in.
    """
    if n < 2:
        raise ValueError(f"a tip pair needs n >= 2, got {n}")
    if x == 1:
        raise ValueError("laplace_tau is not evaluated at x = 1")
    if mode == RATIONAL:
        x = convert(x, RATIONAL)
    else:
        x = float(x)
    b = b_factor(n, x, mode)
    return (2 - (n + 1) * (x + 1) * b) / ((n - 1) * (x - 1))


# central-difference stencils (offset multiples of h, weights, divisor power)
_STENCILS = {
    1: ((-1, 1), (-0.5, 0.5)),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5)),
    4: ((-2, -1, 0, 1, 2), (1.0, -4.0, 6.0, -4.0, 1.0)),
}


def _central(f, m: int, h: float) -> float:
    offsets, weights = _STENCILS[m]
    return math.fsum(w * f(o * h) for o, w in zip(offsets, weights)) / h**m


def laplace_moment(transform, m: int, h: float = 1e-4) -> float:
    """``(-1)**m`` times the m-th derivative at 0, Richardson extrapolated.

    Diagnostic only: central differences at steps ``h`` and ``h/2`` have
    ``O(h**2)`` error, which one Richardson step removes.
    """
    if m not in _STENCILS:
        raise ValueError(f"numeric moments supported for m <= {max(_STENCILS)}")
    coarse = _central(transform, m, h)
    fine = _central(transform, m, h / 2)
    return (-1) ** m * (4 * fine - coarse) / 3
