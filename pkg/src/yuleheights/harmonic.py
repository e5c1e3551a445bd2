"""Generalized harmonic numbers, the ``b_{n,x}`` product and finite sums."""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from typing import Callable

from .numeric import FLOAT, RATIONAL, check_mode, convert

__all__ = ["HarmonicCache", "harmonic", "b_factor", "finite_sum", "default_cache"]


class HarmonicCache:
    """Lazily grown tables of ``H_{n,r} = sum_{i<=n} i**-r``.

    Rational tables hold exact prefix sums.  Float tables hold Neumaier
    compensated prefix sums as ``(sum, correction)`` pairs.  Tables only
    grow; growth takes a lock, lookups of already built entries do not.
    """

    def __init__(self):
        self._rational: dict[int, list[Fraction]] = {}
        self._float: dict[int, tuple[list[float], list[float]]] = {}
        self._lock = threading.Lock()

    @property
    def n_max(self) -> int:
        sizes = [len(t) - 1 for t in self._rational.values()]
        sizes += [len(s) - 1 for s, _ in self._float.values()]
        return max(sizes, default=0)

    @property
    def r_max(self) -> int:
        return max([*self._rational, *self._float], default=0)

    def rational(self, n: int, r: int) -> Fraction:
        table = self._rational.get(r)
        if table is None or len(table) <= n:
            with self._lock:
                table = self._rational.setdefault(r, [Fraction(0)])
                acc = table[-1]
                for i in range(len(table), n + 1):
                    acc += Fraction(1, i**r)
                    table.append(acc)
        return table[n]

    def float(self, n: int, r: int) -> float:
        entry = self._float.get(r)
        if entry is None or len(entry[0]) <= n:
            with self._lock:
                sums, comps = self._float.setdefault(r, ([0.0], [0.0]))
                s, c = sums[-1], comps[-1]
                for i in range(len(sums), n + 1):
                    term = float(i) ** -r
                    t = s + term
                    if abs(s) >= abs(term):
                        c += (s - t) + term
                    else:
                        c += (term - t) + s
                    s = t
                    sums.append(s)
                    comps.append(c)
                entry = (sums, comps)
        return entry[0][n] + entry[1][n]

    def get(self, n: int, r: int, mode: str):
        if n < 0 or r < 1:
            raise ValueError(f"harmonic number needs n >= 0 and r >= 1, got n={n}, r={r}")
        return self.rational(n, r) if mode == RATIONAL else self.float(n, r)


default_cache = HarmonicCache()


def harmonic(n: int, r: int = 1, mode: str = RATIONAL, cache: HarmonicCache | None = None):
    """``H_{n,r}``; ``H_{0,r} = 0``."""
    check_mode(mode)
    return (cache or default_cache).get(n, r, mode or RATIONAL)


def b_factor(n: int, x, mode: str = RATIONAL):
    """``prod_{i=1}^n i / (i + x)``, the Laplace transform of the tree height.

    Defined for ``x > -1``.  Rational mode needs a rational ``x``.
    """
    check_mode(mode)
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if x <= -1:
        raise ValueError(f"b_factor requires x > -1, got {x}")
    if mode == FLOAT:
        x = float(x)
        # log-space keeps large n from under/overflowing
        return math.exp(-math.fsum(math.log1p(x / i) for i in range(1, n + 1)))
    x = convert(x, RATIONAL)
    num = math.factorial(n)
    den = Fraction(1)
    for i in range(1, n + 1):
        den *= i + x
    return num / den


def finite_sum(term: Callable[[int], object], lo: int, hi: int, mode: str = RATIONAL):
    """``sum_{j=lo}^{hi} term(j)``; an empty range gives 0.

    Float mode uses :func:`math.fsum`.
    """
    if lo > hi + 1:
        raise ValueError(f"bad summation range lo={lo}, hi={hi}")
    if mode == FLOAT:
        return math.fsum(float(term(j)) for j in range(lo, hi + 1))
    total = Fraction(0)
    for j in range(lo, hi + 1):
        total += term(j)
    return total
