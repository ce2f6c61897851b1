import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from certdyn.dyadic import Dyadic, sqrt_down, sqrt_up, two_pow

dyadics = st.builds(Dyadic, st.integers(-10**12, 10**12), st.integers(-60, 60))


def test_canonical_form():
    d = Dyadic(12, 3)  # 12*8 = 96 = 3*32
    assert d.man == 3 and d.exp == 5
    z = Dyadic(0, 17)
    assert z.man == 0 and z.exp == 0


@given(dyadics, dyadics)
def test_add_mul_exact(a, b):
    assert (a + b).to_fraction() == a.to_fraction() + b.to_fraction()
    assert (a * b).to_fraction() == a.to_fraction() * b.to_fraction()
    assert (a - b).to_fraction() == a.to_fraction() - b.to_fraction()


@given(dyadics)
def test_canonical_mantissa_odd_or_zero(a):
    assert a.man == 0 or a.man % 2 != 0
    if a.man == 0:
        assert a.exp == 0


@given(dyadics, dyadics)
def test_order_matches_fractions(a, b):
    assert (a < b) == (a.to_fraction() < b.to_fraction())
    assert (a == b) == (a.to_fraction() == b.to_fraction())


def test_float_roundtrip():
    for x in (0.1, -3.75, 2**-40, 1e300):
        d = Dyadic.from_float(x)
        assert d.to_fraction() == Fraction(x)


def test_parse():
    assert Dyadic.parse("-0.75") == Dyadic(-3, -2)
    assert Dyadic.parse("5/8") == Dyadic(5, -3)
    assert Dyadic.parse("3*2^-7") == Dyadic(3, -7)
    with pytest.raises(ValueError):
        Dyadic.parse("1/3")


@given(dyadics, st.integers(4, 80))
def test_directed_rounding(a, prec):
    up = a.round_up(prec)
    dn = a.round_down(prec)
    assert dn <= a <= up
    assert up.bit_size() <= prec + 1
    assert dn.bit_size() <= prec + 1


@given(st.integers(0, 10**12), st.integers(-40, 40))
def test_sqrt_brackets(m, e):
    d = Dyadic(m, 2 * e)
    lo = sqrt_down(d, 60)
    hi = sqrt_up(d, 60)
    assert lo.square() <= d <= hi.square()
    # gap is at most ~1 ulp at 60 bits, relative to the value
    gap = (hi - lo).to_fraction()
    assert gap <= hi.to_fraction() / 2**55 + Fraction(1, 2**120)


def test_floor2():
    assert Dyadic.parse("0.75").floor2(1) == 1   # 0.75 / 0.5 -> floor 1
    assert Dyadic.parse("-0.75").floor2(1) == -2
    assert Dyadic(5).floor2(0) == 5
