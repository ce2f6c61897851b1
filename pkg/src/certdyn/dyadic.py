"""Exact binary-rational (dyadic) arithmetic.

A dyadic number is ``mantissa * 2**exponent`` with an arbitrary-precision
integer mantissa.  Canonical form keeps the mantissa odd (or zero, with
exponent zero), so equality of values is equality of the two fields.

Addition, subtraction and multiplication are exact -- no rounding ever
happens unless one of the ``round_*`` methods is called explicitly.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering
from typing import Union

DyadicLike = Union["Dyadic", int]


@total_ordering
class Dyadic:
    """An exact binary rational, ``man * 2**exp``."""

    __slots__ = ("man", "exp")

    def __init__(self, man: int = 0, exp: int = 0):
        if man == 0:
            self.man = 0
            self.exp = 0
            return
        # canonicalize: strip trailing zero bits of the mantissa
        shift = (man & -man).bit_length() - 1
        self.man = man >> shift
        self.exp = exp + shift

    # -- constructors ------------------------------------------------

    @classmethod
    def from_int(cls, n: int) -> "Dyadic":
        return cls(n, 0)

    @classmethod
    def from_float(cls, x: float) -> "Dyadic":
        """Exact conversion; every finite float is a dyadic."""
        if not math.isfinite(x):
            raise ValueError("non-finite float has no dyadic value")
        m, e = math.frexp(x)
        man = int(m * (1 << 53))
        return cls(man, e - 53)

    @classmethod
    def from_fraction(cls, f: Fraction) -> "Dyadic":
        den = f.denominator
        if den & (den - 1):
            raise ValueError(f"{f} is not a dyadic rational")
        return cls(f.numerator, -(den.bit_length() - 1))

    @classmethod
    def parse(cls, s: str) -> "Dyadic":
        """Parse ``'3'``, ``'-0.75'``, ``'5/8'`` or ``'3*2^-7'`` exactly."""
        s = s.strip()
        if "^" in s:
            m_part, e_part = s.split("*2^")
            return cls(int(m_part), int(e_part))
        if "/" in s:
            return cls.from_fraction(Fraction(s))
        return cls.from_fraction(Fraction(s))

    # -- queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return self.man == 0

    @property
    def sign(self) -> int:
        return (self.man > 0) - (self.man < 0)

    def bit_size(self) -> int:
        """Number of significant bits in the mantissa."""
        return abs(self.man).bit_length()

    def to_fraction(self) -> Fraction:
        if self.exp >= 0:
            return Fraction(self.man << self.exp)
        return Fraction(self.man, 1 << -self.exp)

    def to_float(self) -> float:
        """Nearest float (may overflow to inf for huge exponents)."""
        try:
            return math.ldexp(self.man, self.exp)
        except OverflowError:
            return math.inf if self.man > 0 else -math.inf

    __float__ = to_float

    # -- exact arithmetic ---------------------------------------------

    def __add__(self, other: DyadicLike) -> "Dyadic":
        other = _coerce(other)
        if self.man == 0:
            return other
        if other.man == 0:
            return self
        e = min(self.exp, other.exp)
        return Dyadic((self.man << (self.exp - e)) + (other.man << (other.exp - e)), e)

    def __sub__(self, other: DyadicLike) -> "Dyadic":
        return self + (-_coerce(other))

    def __neg__(self) -> "Dyadic":
        d = Dyadic.__new__(Dyadic)
        d.man = -self.man
        d.exp = self.exp if self.man else 0
        return d

    def __abs__(self) -> "Dyadic":
        return -self if self.man < 0 else self

    def __mul__(self, other: DyadicLike) -> "Dyadic":
        other = _coerce(other)
        return Dyadic(self.man * other.man, self.exp + other.exp)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other: DyadicLike) -> "Dyadic":
        return _coerce(other) - self

    def scale2(self, k: int) -> "Dyadic":
        """Exact multiplication by ``2**k``."""
        if self.man == 0:
            return self
        return Dyadic(self.man, self.exp + k)

    def square(self) -> "Dyadic":
        return Dyadic(self.man * self.man, 2 * self.exp)

    # -- comparisons (exact) ------------------------------------------

    def _cmp(self, other: DyadicLike) -> int:
        other = _coerce(other)
        d = self - other
        return d.sign

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (Dyadic, int)):
            return NotImplemented
        return self._cmp(other) == 0

    def __lt__(self, other: DyadicLike) -> bool:
        return self._cmp(other) < 0

    def __hash__(self):
        return hash((self.man, self.exp))

    # -- directed rounding --------------------------------------------

    def round_dir(self, prec: int, up: bool) -> "Dyadic":
        """Round to at most ``prec`` significant bits, toward +inf (``up``)
        or -inf.  Exact when the mantissa already fits."""
        m = self.man
        if m == 0:
            return self
        excess = abs(m).bit_length() - prec
        if excess <= 0:
            return self
        q, r = divmod(m, 1 << excess)
        if r and up:
            q += 1
        return Dyadic(q, self.exp + excess)

    def round_up(self, prec: int) -> "Dyadic":
        return self.round_dir(prec, True)

    def round_down(self, prec: int) -> "Dyadic":
        return self.round_dir(prec, False)

    def floor2(self, n: int) -> int:
        """Largest integer k with ``k * 2**-n <= self`` (grid floor)."""
        v = self.scale2(n)
        if v.exp >= 0:
            return v.man << v.exp
        return v.man >> -v.exp

    def __repr__(self):
        return f"Dyadic({self.man}, {self.exp})"

    def __str__(self):
        f = self.to_fraction()
        return str(f)


def _coerce(x: DyadicLike) -> Dyadic:
    if isinstance(x, Dyadic):
        return x
    if isinstance(x, int):
        return Dyadic(x, 0)
    raise TypeError(f"cannot mix Dyadic with {type(x).__name__}")


ZERO = Dyadic(0)
ONE = Dyadic(1)


def two_pow(k: int) -> Dyadic:
    return Dyadic(1, k)


def sqrt_down(d: Dyadic, prec: int) -> Dyadic:
    """Largest dyadic with ``prec`` fractional guard bits whose square
    is <= d.  Requires d >= 0."""
    if d.man < 0:
        raise ValueError("sqrt of negative dyadic")
    if d.man == 0:
        return ZERO
    # write d = m * 2^e with e even, compute isqrt(m << 2k) * 2^(e/2 - k)
    m, e = d.man, d.exp
    if e & 1:
        m <<= 1
        e -= 1
    k = max(0, prec - m.bit_length() // 2 + 2)
    r = math.isqrt(m << (2 * k))
    return Dyadic(r, e // 2 - k)


def sqrt_up(d: Dyadic, prec: int) -> Dyadic:
    """Dyadic upper bound on sqrt(d), one ulp above ``sqrt_down`` unless exact."""
    lo = sqrt_down(d, prec)
    if lo.square() == d:
        return lo
    m, e = d.man, d.exp
    if e & 1:
        m <<= 1
        e -= 1
    k = max(0, prec - m.bit_length() // 2 + 2)
    r = math.isqrt(m << (2 * k))
    return Dyadic(r + 1, e // 2 - k)
