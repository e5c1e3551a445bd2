"""Numeric modes shared by every module.

Two modes exist: ``"rational"`` (exact :class:`fractions.Fraction`) and
``"float"`` (IEEE doubles).  Passing ``mode=None`` picks rational for small
``n`` and float above :data:`AUTO_RATIONAL_MAX_N`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

RATIONAL = "rational"
FLOAT = "float"
MODES = (RATIONAL, FLOAT)

AUTO_RATIONAL_MAX_N = 500


class UndefinedAtN(ValueError):
    """A statistic has no value at this tip count (a variance factor is 0)."""


@dataclass(frozen=True)
class Surd:
    """Exact value ``sign * sqrt(radicand)`` with a rational radicand.

    Correlations are ratios of exact covariances and square roots of exact
    variances, so in rational mode they are kept in this form.
    """

    radicand: Fraction
    sign: int = 1

    def __post_init__(self):
        if self.radicand < 0:
            raise ValueError("negative radicand")
        if self.sign not in (-1, 1):
            raise ValueError("sign must be +1 or -1")

    def __float__(self) -> float:
        return self.sign * _sqrt_fraction(self.radicand)

    def __neg__(self) -> "Surd":
        return Surd(self.radicand, -self.sign)

    def __eq__(self, other):
        if isinstance(other, Surd):
            if self.radicand == 0:
                return other.radicand == 0
            return self.radicand == other.radicand and self.sign == other.sign
        if isinstance(other, (int, Fraction)):
            return self.sign * other >= 0 and Fraction(other) ** 2 == self.radicand
        return NotImplemented

    def __hash__(self):
        return hash((self.radicand, self.sign if self.radicand else 1))

    def __str__(self) -> str:
        root = _exact_sqrt(self.radicand)
        if root is not None:
            return format_value(self.sign * root)
        body = f"sqrt({format_value(self.radicand)})"
        return body if self.sign > 0 else "-" + body


Numeric = Union[Fraction, float, Surd]


def _exact_sqrt(q: Fraction) -> Fraction | None:
    p, d = q.numerator, q.denominator
    rp, rd = math.isqrt(p), math.isqrt(d)
    if rp * rp == p and rd * rd == d:
        return Fraction(rp, rd)
    return None


def _sqrt_fraction(q: Fraction) -> float:
    # Scale to integers so the root is correctly rounded even for huge terms.
    p, d = q.numerator, q.denominator
    if p == 0:
        return 0.0
    # ~110 significant bits in the integer root, plus a sticky bit for inexact roots
    half = max(0, (220 - (p.bit_length() - d.bit_length())) // 2 + 1)
    scaled, rem = divmod(p << (2 * half), d)
    root = math.isqrt(scaled)
    if root * root != scaled or rem:
        root |= 1
    return math.ldexp(float(root), -half)


def check_mode(mode: str | None) -> None:
    if mode is not None and mode not in MODES:
        raise ValueError(f"unknown numeric mode {mode!r}; expected one of {MODES}")


def resolve_mode(n: int, mode: str | None) -> str:
    """Return the concrete mode for tip count ``n``."""
    check_mode(mode)
    if mode is not None:
        return mode
    return RATIONAL if n <= AUTO_RATIONAL_MAX_N else FLOAT


def convert(value, mode: str):
    """Coerce an int/Fraction/float into the representation for ``mode``."""
    if mode == RATIONAL:
        if isinstance(value, float):
            raise TypeError("refusing to convert a float into rational mode")
        return Fraction(value)
    return float(value)


def format_value(value) -> str:
    """Render a value: rationals as ``p/q``, floats as shortest round-trip."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numeric values")
    if isinstance(value, Surd):
        return str(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    return repr(float(value))


_RATIONAL_RE = re.compile(r"^-?\d+(/\d+)?$")
_SURD_RE = re.compile(r"^(-?)sqrt\((\d+(?:/\d+)?)\)$")


def parse_value(text: str):
    """Inverse of :func:`format_value`."""
    text = text.strip()
    if _RATIONAL_RE.match(text):
        return Fraction(text)
    m = _SURD_RE.match(text)
    if m:
        return Surd(Fraction(m.group(2)), -1 if m.group(1) else 1)
    return float(text)


def value_mode(value) -> str:
    return FLOAT if isinstance(value, float) else RATIONAL
