import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from certdyn.contfrac import (ContFrac, PrecisionExhausted, RationalInput,
                              expand, gauss_iterates, is_bounded_type)
from certdyn.dyadic import Dyadic
from certdyn.surd import Surd5

GOLDEN = (math.sqrt(5) - 1) / 2


def golden_oracle(m: int) -> Dyadic:
    # dyadic approximations of (sqrt(5)-1)/2 to any precision
    k = m + 8
    man = (math.isqrt(5 << (2 * k)) - (1 << k)) >> 1
    return Dyadic(man, -k)


def test_expand_golden_mean():
    cf = expand(golden_oracle, 6)
    assert cf.terms_prefix(6) == (1, 1, 1, 1, 1, 1)


def test_expand_half_terminates():
    cf = expand(Fraction(1, 2), 1)
    assert cf.is_finite()
    assert cf.head == (2,)
    with pytest.raises(RationalInput):
        cf.term(2)


def test_expand_forward_then_back():
    # value of [2,3,...] built forward from the formula, re-expanded
    x = Fraction(1, 2 + Fraction(1, 3 + Fraction(1, 7)))
    cf = expand(x, 2)
    assert cf.terms_prefix(2) == (2, 3)


def test_expand_oracle_of_rational_exhausts():
    # an oracle for 1/2 can never certify 3 terms
    with pytest.raises(PrecisionExhausted):
        expand(lambda m: Dyadic(1, -1), 3, max_prec=4096)


def test_convergents_golden_q_sequence():
    cf = ContFrac.golden()
    qs = cf.q_sequence(6)
    assert qs == [1, 1, 2, 3, 5, 8]


def test_convergents_lowest_terms():
    assert ContFrac((2,), "finite").convergents(1) == [(1, 2)]
    assert ContFrac((1, 2, 3), "finite").convergents(3)[-1] == (7, 10)
    for p, q in ContFrac((1, 2, 3, 4, 5), "finite").convergents(5):
        assert math.gcd(p, q) == 1


@settings(max_examples=30)
@given(st.lists(st.integers(1, 9), min_size=1, max_size=8))
def test_convergent_error_bound(terms):
    cf = ContFrac(terms, "ones")
    n = len(terms)
    convs = cf.convergents(n)
    p, q = convs[-1]
    # classical error: |theta - p_n/q_n| < 1/(q_n q_{n+1})
    q_next = cf.convergents(n + 1)[-1][1]
    x = cf.value_surd()
    err = x - Fraction(p, q)
    bound = Fraction(1, q * q_next)
    assert (err - bound).sign() < 0 and (err + bound).sign() > 0


def test_gauss_iterates_golden_fixed_point():
    cf = ContFrac.golden()
    its = gauss_iterates(cf, 5, prec=80)
    for iv in its:
        assert iv.contains_ival(Surd5.golden().to_ival(100))


def test_gauss_iterates_second_term():
    # [2,1,1,...]: theta_1 = 1/(2+g) with g the golden value
    cf = ContFrac((2,), "ones")
    iv = gauss_iterates(cf, 1, prec=80)[0]
    want = (Surd5.golden() + 2).inverse()
    assert iv.contains_ival(want.to_ival(100))
    assert abs(float(iv.lo) - 0.3819660112501051) < 1e-12


def test_gauss_iterates_finite():
    cf = ContFrac((2,), "finite")
    iv = gauss_iterates(cf, 1)[0]
    assert iv.lo == Dyadic(1, -1) and iv.hi == Dyadic(1, -1)
    with pytest.raises(RationalInput):
        gauss_iterates(cf, 2)


def test_bounded_type():
    assert is_bounded_type(ContFrac.golden(), 1)
    assert not is_bounded_type(ContFrac((1, 1, 5, 1), "finite"), 4)
    assert is_bounded_type(ContFrac((3, 2, 3), "finite"), 3)


def test_best_approximation_golden():
    # |q_n theta - p_n| < |q theta - p| for all q < q_{n+1}, brute force
    theta = Surd5.golden()
    cf = ContFrac.golden()
    convs = cf.convergents(11)
    for n in range(1, 10):
        p_n, q_n = convs[n - 1]
        q_next = convs[n][1]
        best = _abs_surd(theta * q_n - p_n)
        for q in range(1, q_next):
            if q == q_n:
                continue
            # nearest integer p to q*theta
            p = round(float(theta) * q)
            for pp in (p - 1, p, p + 1):
                err = _abs_surd(theta * q - pp)
                assert (best - err).sign() < 0


def _abs_surd(s):
    return s if s.sign() >= 0 else -s


def test_text_format_roundtrip():
    for s in ("2,5,1...", "1...", "3,1,4,1,5", "7,1..."):
        cf = ContFrac.from_text(s)
        assert cf.to_text() == s


def test_value_ival_unknown_tail_bracket():
    # prefix [2,3] of an unknown number: bracket must contain all completions
    cf = ContFrac((2, 3), "unknown")
    iv = cf.value_ival(64)
    for tail_val in (Fraction(0), Fraction(1, 2), Fraction(99, 100)):
        x = Fraction(1, 2 + Fraction(1, 3 + tail_val))
        assert iv.lo.to_fraction() <= x <= iv.hi.to_fraction()
