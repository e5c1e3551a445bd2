import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from yuleheights.numeric import (
    FLOAT, RATIONAL, Surd, convert, format_value, parse_value, resolve_mode, value_mode,
)

fractions = st.fractions(max_denominator=10**12)


@given(fractions)
def test_rational_text_round_trip(q):
    assert parse_value(format_value(q)) == q


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_text_round_trip_is_bit_exact(x):
    y = parse_value(format_value(x))
    assert isinstance(y, float) and y == x and math.copysign(1, y) == math.copysign(1, x)


@given(st.fractions(min_value=0, max_denominator=10**6), st.sampled_from([1, -1]))
def test_surd_round_trip_and_float(q, sign):
    s = Surd(q, sign)
    assert parse_value(format_value(s)) == s or q == 0 or math.isqrt(q.numerator) ** 2 == q.numerator
    assert float(s) == pytest.approx(sign * math.sqrt(q), rel=1e-15, abs=0)


def test_surd_perfect_square_prints_exactly():
    assert str(Surd(Fraction(4, 9), -1)) == "-2/3"
    assert str(Surd(Fraction(2, 3))) == "sqrt(2/3)"
    assert Surd(Fraction(1)) == 1
    assert -Surd(Fraction(2)) == Surd(Fraction(2), -1)


def test_surd_float_is_correctly_rounded():
    # sqrt(2) to double precision
    assert float(Surd(Fraction(2))) == math.sqrt(2)
    big = Fraction(10**40 + 1, 3)
    assert float(Surd(big)) == pytest.approx(math.sqrt(float(big)), rel=2e-16)


def test_mode_resolution():
    assert resolve_mode(500, None) == RATIONAL
    assert resolve_mode(501, None) == FLOAT
    assert resolve_mode(10, FLOAT) == FLOAT
    with pytest.raises(ValueError):
        resolve_mode(10, "decimal")


def test_convert_refuses_float_to_rational():
    assert convert(3, RATIONAL) == Fraction(3)
    assert convert(Fraction(1, 4), FLOAT) == 0.25
    with pytest.raises(TypeError):
        convert(0.5, RATIONAL)
    assert value_mode(0.5) == FLOAT and value_mode(Fraction(1, 2)) == RATIONAL
