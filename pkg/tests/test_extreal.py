import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from areaformula.extreal import (
    FLOAT, INF, RATIONAL, InexactPowerError, coerce, encode, mul, power, rel_gap, total,
)


def test_coerce_tokens():
    assert coerce("inf") == INF
    assert coerce("2/7") == Fraction(2, 7)
    assert coerce(0.1) == Fraction(1, 10)
    assert isinstance(coerce("3", FLOAT), float)


@pytest.mark.parametrize("bad", [-1, "-2/3", float("nan"), -math.inf])
def test_coerce_rejects_outside_half_line(bad):
    with pytest.raises(ValueError):
        coerce(bad)


def test_zero_times_inf_is_zero():
    assert mul(0, INF) == 0
    assert mul(INF, Fraction(0)) == 0
    assert mul(2, INF) == INF


def test_total_with_inf():
    assert total([Fraction(1), INF, Fraction(2)]) == INF
    assert total([]) == 0


def test_exact_powers():
    assert power(Fraction(4, 9), Fraction(1, 2)) == Fraction(2, 3)
    assert power(Fraction(8), Fraction(2, 3)) == 4
    with pytest.raises(InexactPowerError):
        power(Fraction(2), Fraction(1, 2))
    with pytest.raises(InexactPowerError):
        power(Fraction(2), math.log(2) / math.log(3), RATIONAL)
    assert power(Fraction(3), 0.5, FLOAT) == pytest.approx(math.sqrt(3))


def test_encode_round_trip():
    for v in (Fraction(3, 4), Fraction(5), INF, 0.25):
        assert coerce(encode(v), RATIONAL if not isinstance(v, float) else FLOAT) == v


def test_rel_gap():
    assert rel_gap(INF, INF) == 0
    assert rel_gap(INF, 1) == INF
    assert rel_gap(2, 1) == 0.5


@given(st.fractions(min_value=0, max_value=100), st.integers(1, 4))
def test_power_integer_roots(x, k):
    assert power(x**k, Fraction(1, k)) == x
