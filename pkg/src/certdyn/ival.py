"""Real intervals with exact dyadic endpoints.

Addition/subtraction/multiplication of intervals are exact; division and
the transcendental functions round outward at a caller-supplied working
precision.  Directed rounding of log/exp/sin/cos/roots is delegated to
MPFR via gmpy2, whose results are correctly rounded, so every interval
returned here encloses the true value.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

import gmpy2

from .dyadic import Dyadic, sqrt_down, sqrt_up

Number = Union["RIval", Dyadic, int]


def _to_mpfr_exact(d: Dyadic):
    with gmpy2.context(precision=max(d.bit_size() + 2, 10)):
        return gmpy2.mul_2exp(gmpy2.mpfr(d.man), d.exp)


def _from_mpfr(x) -> Dyadic:
    m, e = x.as_mantissa_exp()
    return Dyadic(int(m), int(e))


class RIval:
    """Closed interval [lo, hi] with dyadic endpoints."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: Dyadic, hi: Dyadic):
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    # -- constructors ------------------------------------------------

    @classmethod
    def point(cls, x: Union[Dyadic, int]) -> "RIval":
        d = x if isinstance(x, Dyadic) else Dyadic(x)
        return cls(d, d)

    @classmethod
    def from_fraction(cls, f: Fraction, prec: int) -> "RIval":
        if not f.denominator & (f.denominator - 1):
            return cls.point(Dyadic.from_fraction(f))
        num = Dyadic(f.numerator)
        den = Dyadic(f.denominator)
        return cls.point(num).div(cls.point(den), prec)

    # -- queries -----------------------------------------------------

    def width(self) -> Dyadic:
        return self.hi - self.lo

    def mid(self) -> Dyadic:
        return (self.lo + self.hi).scale2(-1)

    def contains(self, x: Union[Dyadic, int]) -> bool:
        return self.lo <= x <= self.hi

    def contains_ival(self, other: "RIval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def strictly_positive(self) -> bool:
        return self.lo.sign > 0

    def strictly_negative(self) -> bool:
        return self.hi.sign < 0

    def __repr__(self):
        return f"RIval({float(self.lo):.17g}, {float(self.hi):.17g})"

    # -- exact ring ops ----------------------------------------------

    def __add__(self, other: Number) -> "RIval":
        o = _coerce(other)
        return RIval(self.lo + o.lo, self.hi + o.hi)

    def __sub__(self, other: Number) -> "RIval":
        o = _coerce(other)
        return RIval(self.lo - o.hi, self.hi - o.lo)

    def __neg__(self) -> "RIval":
        return RIval(-self.hi, -self.lo)

    def __mul__(self, other: Number) -> "RIval":
        o = _coerce(other)
        cands = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return RIval(min(cands), max(cands))

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other: Number) -> "RIval":
        return _coerce(other) - self

    def scale2(self, k: int) -> "RIval":
        return RIval(self.lo.scale2(k), self.hi.scale2(k))

    def round(self, prec: int) -> "RIval":
        """Outward rounding of both endpoints to ``prec`` bits."""
        return RIval(self.lo.round_down(prec), self.hi.round_up(prec))

    def hull(self, other: "RIval") -> "RIval":
        return RIval(min(self.lo, other.lo), max(self.hi, other.hi))

    # -- rounded ops --------------------------------------------------

    def div(self, other: Number, prec: int) -> "RIval":
        o = _coerce(other)
        if o.contains(0):
            raise ZeroDivisionError("interval divisor contains 0")
        return self * o._recip(prec)

    def _recip(self, prec: int) -> "RIval":
        lo, hi = self.lo, self.hi
        return RIval(_div_dir(1, hi, prec, False), _div_dir(1, lo, prec, True))

    def sqrt(self, prec: int) -> "RIval":
        if self.hi.sign < 0:
            raise ValueError("sqrt of negative interval")
        lo = self.lo if self.lo.sign > 0 else Dyadic(0)
        return RIval(sqrt_down(lo, prec), sqrt_up(self.hi, prec))

    def log(self, prec: int) -> "RIval":
        if self.lo.sign <= 0:
            raise ValueError("log needs a strictly positive interval")
        return _mpfr_pair(gmpy2.log, self, prec)

    def exp(self, prec: int) -> "RIval":
        return _mpfr_pair(gmpy2.exp, self, prec)

    def sin(self, prec: int) -> "RIval":
        return _mpfr_monotone_unsafe(gmpy2.sin, self, prec)

    def cos(self, prec: int) -> "RIval":
        return _mpfr_monotone_unsafe(gmpy2.cos, self, prec)

    def rootn(self, n: int, prec: int) -> "RIval":
        """n-th root of a nonnegative interval."""
        if self.lo.sign < 0:
            raise ValueError("rootn needs a nonnegative interval")
        with gmpy2.context(precision=prec, round=gmpy2.RoundDown):
            lo = gmpy2.rootn(_to_mpfr_exact(self.lo), n)
        with gmpy2.context(precision=prec, round=gmpy2.RoundUp):
            hi = gmpy2.rootn(_to_mpfr_exact(self.hi), n)
        return RIval(_from_mpfr(lo), _from_mpfr(hi))


def _coerce(x: Number) -> RIval:
    if isinstance(x, RIval):
        return x
    if isinstance(x, (Dyadic, int)):
        return RIval.point(x)
    raise TypeError(f"cannot mix RIval with {type(x).__name__}")


def _div_dir(num: int, den: Dyadic, prec: int, up: bool) -> Dyadic:
    rnd = gmpy2.RoundUp if up else gmpy2.RoundDown
    with gmpy2.context(precision=prec, round=rnd):
        q = gmpy2.div(gmpy2.mpfr(num), _to_mpfr_exact(den))
    return _from_mpfr(q)


def _mpfr_pair(fn, iv: RIval, prec: int) -> RIval:
    """Apply a monotone-increasing MPFR function with outward rounding."""
    with gmpy2.context(precision=prec, round=gmpy2.RoundDown):
        lo = fn(_to_mpfr_exact(iv.lo))
    with gmpy2.context(precision=prec, round=gmpy2.RoundUp):
        hi = fn(_to_mpfr_exact(iv.hi))
    return RIval(_from_mpfr(lo), _from_mpfr(hi))


def _mpfr_monotone_unsafe(fn, iv: RIval, prec: int) -> RIval:
    """sin/cos on an interval: evaluate at endpoints and midpoint and take
    the hull, padded by the interval width (|derivative| <= 1), which is a
    sound enclosure for any 1-Lipschitz function."""
    pts = [iv.lo, iv.mid(), iv.hi]
    vals = []
    for p in pts:
        with gmpy2.context(precision=prec, round=gmpy2.RoundDown):
            vals.append(_from_mpfr(fn(_to_mpfr_exact(p))))
        with gmpy2.context(precision=prec, round=gmpy2.RoundUp):
            vals.append(_from_mpfr(fn(_to_mpfr_exact(p))))
    half = iv.width().scale2(-1)
    # half-width pad dominates the deviation from the three sample points
    return RIval(min(vals) - half, max(vals) + half)


def pi_ival(prec: int) -> RIval:
    with gmpy2.context(precision=prec, round=gmpy2.RoundDown):
        lo = gmpy2.const_pi()
    with gmpy2.context(precision=prec, round=gmpy2.RoundUp):
        hi = gmpy2.const_pi()
    return RIval(_from_mpfr(lo), _from_mpfr(hi))


def log2_ival(prec: int) -> RIval:
    return RIval.point(Dyadic(2)).log(prec)
