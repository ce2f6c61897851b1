"""Continued fractions on (0,1): expansions, convergents, Gauss iterates.

A ``ContFrac`` holds positive integer terms r_1, r_2, ... in one of four
tail forms:

* ``finite``   -- the number is rational, terms end;
* ``ones``     -- finite head followed by an infinite all-ones tail
                  (every value is then a Q(sqrt5) surd);
* ``gen``      -- terms produced on demand by a generator function,
                  optionally with a declared uniform bound on the terms;
* ``unknown``  -- only a head is known (e.g. a certified expansion
                  prefix of an oracle-given number).

Text format: comma-separated terms, optional ``1...`` suffix for the
all-ones tail, e.g. ``"2,5,1..."``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple, Union

from .dyadic import Dyadic
from .ival import RIval
from .surd import Surd5


from .errors import PrecisionExhausted, RationalInput


class ContFrac:
    __slots__ = ("head", "tail", "gen", "term_bound")

    def __init__(self, head: Sequence[int], tail: str = "unknown",
                 gen: Optional[Callable[[int], int]] = None,
                 term_bound: Optional[int] = None):
        head = tuple(int(t) for t in head)
        if any(t < 1 for t in head):
            raise ValueError("continued-fraction terms must be >= 1")
        if tail not in ("finite", "ones", "gen", "unknown"):
            raise ValueError(f"bad tail kind {tail!r}")
        if tail == "gen" and gen is None:
            raise ValueError("tail='gen' needs a generator")
        if tail == "finite" and head and head[-1] == 1 and len(head) > 1:
            # canonical finite form: [..., a, 1] == [..., a+1]
            head = head[:-2] + (head[-2] + 1,)
        self.head = head
        self.tail = tail
        self.gen = gen
        self.term_bound = term_bound

    # -- construction ---------------------------------------------------

    @classmethod
    def golden(cls) -> "ContFrac":
        return cls((), "ones")

    @classmethod
    def from_rational(cls, x: Union[Fraction, Dyadic]) -> "ContFrac":
        if isinstance(x, Dyadic):
            x = x.to_fraction()
        if not 0 < x < 1:
            raise ValueError("continued fractions here live on (0,1)")
        terms = []
        num, den = x.numerator, x.denominator
        # x = den'/num' flips: standard Euclidean expansion of 1/x
        a, b = den, num
        while b:
            q, r = divmod(a, b)
            terms.append(q)
            a, b = b, r
        return cls(terms, "finite")

    @classmethod
    def from_text(cls, s: str) -> "ContFrac":
        s = s.strip()
        if s.endswith("1..."):
            body = s[: -len("1...")].rstrip(",")
            head = tuple(int(t) for t in body.split(",")) if body else ()
            return cls(head, "ones")
        return cls(tuple(int(t) for t in s.split(",")), "finite")

    def to_text(self) -> str:
        if self.tail == "ones":
            return ",".join(str(t) for t in self.head) + ",1..." if self.head else "1..."
        if self.tail == "finite":
            return ",".join(str(t) for t in self.head)
        raise ValueError("only finite or ones-tail expansions have a text form")

    # -- term access ------------------------------------------------------

    def n_known(self) -> Optional[int]:
        """Number of terms available without error; None = unbounded."""
        if self.tail in ("ones", "gen"):
            return None
        return len(self.head)

    def term(self, i: int) -> int:
        """1-based term access."""
        if i < 1:
            raise IndexError("terms are 1-based")
        if i <= len(self.head):
            return self.head[i - 1]
        if self.tail == "ones":
            return 1
        if self.tail == "gen":
            t = int(self.gen(i))
            if t < 1:
                raise ValueError("generator produced a term < 1")
            if self.term_bound is not None and t > self.term_bound:
                raise ValueError("generator exceeded its declared term bound")
            return t
        if self.tail == "finite":
            raise RationalInput(f"expansion has only {len(self.head)} terms")
        raise PrecisionExhausted(
            f"only {len(self.head)} terms of the expansion are certified")

    def terms_prefix(self, n: int) -> Tuple[int, ...]:
        return tuple(self.term(i) for i in range(1, n + 1))

    def shift(self, k: int) -> "ContFrac":
        """The expansion of the k-th Gauss iterate, [r_{k+1}, r_{k+2}, ...]."""
        if k < len(self.head):
            return ContFrac(self.head[k:], self.tail, self.gen, self.term_bound)
        if self.tail == "ones":
            return ContFrac((), "ones")
        if self.tail == "gen":
            off = k
            return ContFrac((), "gen", lambda i, _o=off: self.gen(i + _o),
                            self.term_bound)
        if self.tail == "finite":
            raise RationalInput("shift past the end of a finite expansion")
        raise PrecisionExhausted("shift past the certified prefix")

    def is_finite(self) -> bool:
        return self.tail == "finite"

    def extend_head(self, n: int) -> "ContFrac":
        """Materialize n terms into the head (for gen-backed expansions)."""
        if len(self.head) >= n or self.tail in ("finite", "ones"):
            return self
        return ContFrac(self.terms_prefix(n), self.tail, self.gen, self.term_bound)

    def with_ones_tail(self, keep: int) -> "ContFrac":
        """[r_1..r_keep, 1, 1, ...]"""
        return ContFrac(self.terms_prefix(keep), "ones")

    def __repr__(self):
        body = ",".join(map(str, self.head[:8])) + ("..." if len(self.head) > 8 else "")
        return f"ContFrac([{body}] tail={self.tail})"

    # -- values -----------------------------------------------------------

    def value_fraction(self) -> Fraction:
        if self.tail != "finite":
            raise ValueError("only finite expansions have exact rational values")
        v = Fraction(0)
        for t in reversed(self.head):
            v = Fraction(1, t + v)
        return v

    def value_surd(self) -> Surd5:
        """Exact value for ones-tail (or finite) expansions."""
        if self.tail == "ones":
            v: Surd5 = Surd5.golden()
        elif self.tail == "finite":
            return Surd5(self.value_fraction(), 0)
        else:
            raise ValueError("no closed form for this tail")
        for t in reversed(self.head):
            v = (v + t).inverse()
        return v

    def value_ival(self, prec: int, nterms: Optional[int] = None) -> RIval:
        """Certified interval for the value.

        finite/ones tails: exact evaluation rounded at prec.  Otherwise the
        classical two-convergent bracket on the first available terms."""
        if self.tail == "finite":
            return RIval.from_fraction(self.value_fraction(), prec)
        if self.tail == "ones":
            return self.value_surd().to_ival(prec)
        n = nterms
        if n is None:
            n = len(self.head) if self.tail == "unknown" else max(
                2, (prec * 3) // 4)
        ts = list(self.terms_prefix(n))
        if not ts:
            raise PrecisionExhausted("no terms available")
        lo_f = _eval_terms(ts)
        ts[-1] += 1
        hi_f = _eval_terms(ts)
        a = RIval.from_fraction(min(lo_f, hi_f), prec)
        b = RIval.from_fraction(max(lo_f, hi_f), prec)
        return RIval(a.lo, b.hi)

    # -- convergents --------------------------------------------------------

    def convergents(self, n: int) -> list:
        """[(p_1,q_1), ..., (p_n,q_n)] with p_k/q_k = [r_1..r_k] in lowest
        terms (q_1 = r_1 convention)."""
        out = []
        p_prev, q_prev = 1, 0  # value [..] empty
        p, q = 0, 1
        for k in range(1, n + 1):
            r = self.term(k)
            p, p_prev = r * p + p_prev, p
            q, q_prev = r * q + q_prev, q
            out.append((p, q))
        return out

    def q_sequence(self, n: int) -> list:
        """[q_1..q_n] of the growth recurrence q_{k+1} = r_{k+1} q_k + q_{k-1}
        with q_0 = 0, q_1 = 1 (the denominator-growth convention used in the
        convergence-rate estimates; shifted by one index from the true
        convergent denominators)."""
        qs = []
        q_prev, q = 0, 1
        for k in range(1, n + 1):
            qs.append(q)
            if k < n:
                r = self.term(k + 1)
                q, q_prev = r * q + q_prev, q
        return qs


def _eval_terms(ts: Sequence[int]) -> Fraction:
    v = Fraction(0)
    for t in reversed(ts):
        v = Fraction(1, t + v)
    return v


# -- operations ---------------------------------------------------------------


Oracle = Callable[[int], Dyadic]


def expand(x: Union[Fraction, Dyadic, Oracle], n: int,
           max_prec: int = 1 << 16) -> ContFrac:
    """First n terms of the continued-fraction expansion, certified.

    ``x`` may be an exact rational/dyadic, or an oracle: a callable
    ``m -> Dyadic`` with ``|oracle(m) - x| < 2^-m``.  Rational inputs
    yield a finite expansion (possibly shorter than n).  Oracle inputs
    yield a certified prefix; if the oracle precision cannot separate x
    from a rational boundary, PrecisionExhausted is raised.
    """
    if isinstance(x, (Fraction, Dyadic)):
        cf = ContFrac.from_rational(x if isinstance(x, Fraction) else x.to_fraction())
        return cf
    m = 64
    while True:
        d = x(m)
        eps = Fraction(1, 1 << m)
        lo = d.to_fraction() - eps
        hi = d.to_fraction() + eps
        terms = []
        ok = True
        while len(terms) < n:
            if lo <= 0 or hi >= 1:
                ok = False
                break
            # one Gauss step on the bracket [lo, hi] subset (0,1)
            inv_lo, inv_hi = 1 / hi, 1 / lo
            t_lo, t_hi = int(inv_lo), int(inv_hi)
            if inv_hi == t_hi:  # exact integer endpoint: ambiguous floor
                ok = False
                break
            if t_lo != t_hi:
                ok = False
                break
            terms.append(t_lo)
            lo, hi = inv_lo - t_lo, inv_hi - t_lo
        if ok:
            return ContFrac(terms, "unknown")
        m *= 2
        if m > max_prec:
            raise PrecisionExhausted(
                f"oracle precision 2^-{max_prec} cannot certify {n} terms "
                "(the number may be rational or too well approximated)")


def gauss_iterates(cf: ContFrac, n: int, prec: int = 64) -> list:
    """[theta_1, ..., theta_n] as certified intervals (exact width 0 for
    rational values); theta_k = [r_k, r_{k+1}, ...]."""
    out = []
    for k in range(n):
        sh = cf.shift(k)
        if sh.tail == "finite" and not sh.head:
            raise RationalInput(f"theta_{k+1} is undefined (expansion ended)")
        out.append(sh.value_ival(prec))
    return out


def is_bounded_type(cf: ContFrac, bound: int) -> bool:
    """True iff all *available* terms are <= bound.

    For finite and all-ones tails this is a complete check; for gen/unknown
    tails it inspects the known head only (prefix-only check).
    """
    if any(t > bound for t in cf.head):
        return False
    if cf.tail == "ones":
        return bound >= 1
    return True
