"""Exact arithmetic in Q(sqrt(5)).

Numbers u + v*sqrt(5) with rational u, v.  Continued fractions with an
all-ones tail evaluate, along with every Gauss-map iterate, inside this
field, which keeps long products exact until a final interval rounding.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

from .dyadic import Dyadic
from .ival import RIval

Rat = Union[int, Fraction]


class Surd5:
    __slots__ = ("u", "v")

    def __init__(self, u: Rat = 0, v: Rat = 0):
        self.u = Fraction(u)
        self.v = Fraction(v)

    @classmethod
    def golden(cls) -> "Surd5":
        """(sqrt(5) - 1) / 2, the value of [1,1,1,...]."""
        return cls(Fraction(-1, 2), Fraction(1, 2))

    def __add__(self, o: Union["Surd5", Rat]) -> "Surd5":
        o = _coerce(o)
        return Surd5(self.u + o.u, self.v + o.v)

    def __sub__(self, o: Union["Surd5", Rat]) -> "Surd5":
        o = _coerce(o)
        return Surd5(self.u - o.u, self.v - o.v)

    def __neg__(self) -> "Surd5":
        return Surd5(-self.u, -self.v)

    def __mul__(self, o: Union["Surd5", Rat]) -> "Surd5":
        o = _coerce(o)
        return Surd5(self.u * o.u + 5 * self.v * o.v,
                     self.u * o.v + self.v * o.u)

    def inverse(self) -> "Surd5":
        den = self.u * self.u - 5 * self.v * self.v
        if den == 0:
            raise ZeroDivisionError("zero element of Q(sqrt5)")
        return Surd5(self.u / den, -self.v / den)

    def __truediv__(self, o: Union["Surd5", Rat]) -> "Surd5":
        return self * _coerce(o).inverse()

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, o):
        return _coerce(o) - self

    def sign(self) -> int:
        """Exact sign of u + v*sqrt(5)."""
        u, v = self.u, self.v
        if v == 0:
            return (u > 0) - (u < 0)
        if u == 0:
            return (v > 0) - (v < 0)
        if u > 0 and v > 0:
            return 1
        if u < 0 and v < 0:
            return -1
        # opposite signs: compare u^2 with 5 v^2; sign follows the larger
        d = u * u - 5 * v * v
        big_is_u = d > 0
        if d == 0:
            return 0  # impossible for nonzero rationals, kept for safety
        if big_is_u:
            return 1 if u > 0 else -1
        return 1 if v > 0 else -1

    def __eq__(self, o: object) -> bool:
        if not isinstance(o, (Surd5, int, Fraction)):
            return NotImplemented
        return (self - _coerce(o)).sign() == 0

    def __lt__(self, o) -> bool:
        return (self - _coerce(o)).sign() < 0

    def __le__(self, o) -> bool:
        return (self - _coerce(o)).sign() <= 0

    def __gt__(self, o) -> bool:
        return (self - _coerce(o)).sign() > 0

    def __ge__(self, o) -> bool:
        return (self - _coerce(o)).sign() >= 0

    def __hash__(self):
        return hash((self.u, self.v))

    def is_rational(self) -> bool:
        return self.v == 0

    def to_ival(self, prec: int) -> RIval:
        """Certified interval enclosure at prec bits."""
        s5 = _sqrt5_ival(prec)
        return (RIval.from_fraction(self.u, prec)
                + RIval.from_fraction(self.v, prec) * s5).round(prec)

    def __float__(self):
        return float(self.u) + float(self.v) * math.sqrt(5)

    def __repr__(self):
        return f"Surd5({self.u} + {self.v}*sqrt5)"


def _coerce(o) -> Surd5:
    if isinstance(o, Surd5):
        return o
    if isinstance(o, (int, Fraction)):
        return Surd5(o, 0)
    raise TypeError(f"cannot coerce {type(o).__name__} to Surd5")


_SQRT5_CACHE: dict = {}


def _sqrt5_ival(prec: int) -> RIval:
    got = _SQRT5_CACHE.get(prec)
    if got is None:
        got = RIval.point(Dyadic(5)).sqrt(prec)
        _SQRT5_CACHE[prec] = got
    return got
