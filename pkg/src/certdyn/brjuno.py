"""The Yoccoz sum Phi, its certified truncations, the explicit formula at
rationals, and the single-term perturbation engine.

Phi(theta) = sum_{n>=1} theta_1 ... theta_{n-1} * log(1/theta_n), where
theta_k are the Gauss-map iterates.  For expansions with an all-ones tail
the iterates live in Q(sqrt5), the products are exact, and the tail sums
to a geometric closed form, so Phi gets certified to any precision.  For
generator-backed expansions with a declared term bound B the tail is
bounded by 4 * P_N * log(B+1), using theta_i * theta_{i+1} < 1/2.

The perturbation engine inserts a single large term N after a run of
ones and certifies a prescribed increase of Phi by direct interval
re-evaluation; protection indices t are certified by bounding Phi from
below over *all* tail rewrites (every summand is positive, and each
Gauss iterate of a fixed prefix ranges in an explicit bracket).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .contfrac import ContFrac, _eval_terms
from .dyadic import Dyadic, two_pow
from .ival import RIval, pi_ival
from .surd import Surd5


from .errors import BudgetExhausted, DegenerateCoefficient, TailUnbounded


@dataclass
class BrjunoValue:
    value: RIval              # enclosure of the evaluated (head) sum
    truncation_index: int     # number of summands evaluated
    tail_bound: Dyadic        # certified bound on the discarded tail

    def total(self) -> RIval:
        """Enclosure of the full sum: [value.lo, value.hi + tail_bound]."""
        return RIval(self.value.lo, self.value.hi + self.tail_bound)

    def __repr__(self):
        return (f"BrjunoValue([{float(self.value.lo):.9g},"
                f" {float(self.value.hi):.9g}] +tail<={float(self.tail_bound):.3g})")


@dataclass
class PerturbationResult:
    m: int                    # ones-run length; N sits at position len(prefix)+m
    N: int                    # inserted term
    t: int                    # protected-tail length
    phi_before: BrjunoValue
    phi_after: BrjunoValue


# -- Phi ---------------------------------------------------------------------


def phi(cf: ContFrac, tol: Dyadic = two_pow(-30), prec: int = 0) -> BrjunoValue:
    """Certified evaluation of the Yoccoz sum.

    finite expansions: the truncated sum (exact rational iterates);
    all-ones tails: exact head plus geometric closed-form tail;
    generator tails with a declared term bound: certified truncation;
    anything else raises TailUnbounded.
    """
    if prec <= 0:
        prec = max(64, 3 * tol_bits(tol) // 2 + 16)
    for attempt in range(6):
        got = _phi_once(cf, tol, prec)
        if got.value.width() + got.tail_bound <= tol:
            return got
        prec *= 2
    return got


def tol_bits(tol: Dyadic) -> int:
    f = tol.to_fraction()
    if f <= 0:
        raise ValueError("tolerance must be positive")
    import math
    return max(1, -int(math.floor(math.log2(f))))


def _phi_once(cf: ContFrac, tol: Dyadic, prec: int) -> BrjunoValue:
    if cf.tail == "finite":
        total = RIval.point(0)
        prod = Fraction(1)
        for n in range(1, len(cf.head) + 1):
            th = cf.shift(n - 1).value_fraction()
            term = RIval.from_fraction(prod, prec) * _log_inv_frac(th, prec)
            total = (total + term).round(prec)
            prod *= th
        return BrjunoValue(total, len(cf.head), Dyadic(0))

    if cf.tail == "ones":
        head_len = len(cf.head)
        total = RIval.point(0)
        prod = Surd5(1, 0)
        for n in range(1, head_len + 1):
            th = cf.shift(n - 1).value_surd()
            term = prod.to_ival(prec) * _log_inv_surd(th, prec)
            total = (total + term).round(prec)
            prod = prod * th
        # tail: sum_{j>=0} P * g^j * log(1/g) = P * log(1/g) / (1 - g)
        g = Surd5.golden()
        tail = (prod.to_ival(prec) * _log_inv_surd(g, prec)).div(
            (1 - g).to_ival(prec), prec)
        total = (total + tail).round(prec)
        return BrjunoValue(total, head_len, Dyadic(0))

    if cf.tail == "gen" and cf.term_bound is not None:
        logb = RIval.point(Dyadic(cf.term_bound + 1)).log(prec)
        total = RIval.point(0)
        prod = RIval.point(1)
        n = 0
        while True:
            n += 1
            sh = cf.shift(n - 1)
            th = sh.value_ival(prec, nterms=max(8, prec // 2))
            total = (total + prod * _log_inv_ival(th, prec)).round(prec)
            prod = (prod * th).round(prec)
            tail_hi = (prod * logb * 4).hi
            if tail_hi <= tol.scale2(-1) or n > 4 * prec:
                return BrjunoValue(total, n, tail_hi)

    raise TailUnbounded(
        "cannot certify the tail: need a finite expansion, an all-ones "
        "tail, or a generator with a declared term bound")


def _log_inv_frac(x: Fraction, prec: int) -> RIval:
    return -RIval.from_fraction(x, prec).log(prec)


def _log_inv_surd(x: Surd5, prec: int) -> RIval:
    return -x.to_ival(prec).log(prec)


def _log_inv_ival(x: RIval, prec: int) -> RIval:
    return -x.log(prec)


def phi_split(cf: ContFrac, n: int, m: int, tol: Dyadic = two_pow(-30)
              ) -> Tuple[BrjunoValue, BrjunoValue]:
    """Split Phi = Phi_minus + Phi_one at the single summand with index
    j = n + m (1-based): Phi_one = theta_1...theta_{j-1} log(1/theta_j)."""
    j = n + m
    if j < 1:
        raise ValueError("split index must be >= 1")
    prec = max(64, 3 * tol_bits(tol) // 2 + 16)
    full = phi(cf, tol, prec)
    if cf.tail == "ones":
        prod = Surd5(1, 0)
        for i in range(1, j):
            prod = prod * cf.shift(i - 1).value_surd()
        th = cf.shift(j - 1).value_surd()
        one = prod.to_ival(prec) * _log_inv_surd(th, prec)
    elif cf.tail == "finite":
        if j > len(cf.head):
            raise ValueError("split index beyond the truncated sum")
        prod = Fraction(1)
        for i in range(1, j):
            prod *= cf.shift(i - 1).value_fraction()
        one = RIval.from_fraction(prod, prec) * _log_inv_frac(
            cf.shift(j - 1).value_fraction(), prec)
    else:
        raise TailUnbounded("phi_split needs a closed-form tail")
    minus = full.value - one
    return (BrjunoValue(minus.round(prec), full.truncation_index, full.tail_bound),
            BrjunoValue(one.round(prec), 1, Dyadic(0)))


# -- free-tail bounds ---------------------------------------------------------


def phi_head_lb_free_tail(fixed: Sequence[int], prec: int = 96) -> Dyadic:
    """Certified lower bound on Phi over ALL infinite continuations of the
    fixed term prefix.  Every summand of Phi is positive, so the first
    len(fixed) summands evaluated over the bracket of each iterate bound
    the whole sum from below."""
    K = len(fixed)
    lo_total = Dyadic(0)
    prod = RIval.point(1)
    for n in range(1, K + 1):
        th = _free_bracket(fixed[n - 1:], prec)
        term = prod * _log_inv_ival(th, prec)
        if term.lo.sign > 0:
            lo_total = lo_total + term.lo
        prod = (prod * th).round(prec)
    return lo_total


def phi_head_ub_bounded_tail(fixed: Sequence[int], bound: int, prec: int = 96
                             ) -> Dyadic:
    """Certified upper bound on Phi over all continuations whose terms stay
    <= bound (the fixed prefix may exceed the bound; only the tail matters
    for the geometric estimate)."""
    K = len(fixed)
    hi_total = Dyadic(0)
    prod = RIval.point(1)
    for n in range(1, K + 1):
        th = _free_bracket(fixed[n - 1:], prec)
        hi_total = hi_total + (prod * _log_inv_ival(th, prec)).hi
        prod = (prod * th).round(prec)
    logb = RIval.point(Dyadic(bound + 1)).log(prec)
    hi_total = hi_total + (prod * logb * 4).hi
    return hi_total


def _free_bracket(terms: Sequence[int], prec: int) -> RIval:
    """Enclosure of [terms..., arbitrary tail] (classical two-endpoint
    bracket)."""
    ts = list(terms)
    a = _eval_terms(ts)
    ts[-1] += 1
    b = _eval_terms(ts)
    lo, hi = (a, b) if a < b else (b, a)
    return RIval(RIval.from_fraction(lo, prec).lo, RIval.from_fraction(hi, prec).hi)


# -- tail-of-ones bound -------------------------------------------------------


def tail_of_ones_bound(cf: ContFrac, epsilon: Dyadic, prec: int = 96,
                       max_m: int = 4096) -> int:
    """Smallest certified m such that Phi([r_1..r_k, 1, 1, ...]) stays below
    Phi(cf) + epsilon for every k >= m."""
    if cf.tail == "ones":
        bound = max([1] + list(cf.head))
    elif cf.tail == "gen" and cf.term_bound is not None:
        bound = max(cf.term_bound, 1)
    elif cf.tail == "finite":
        raise ValueError("tail_of_ones_bound expects an infinite expansion")
    else:
        raise TailUnbounded("need an all-ones tail or a declared term bound")
    base = phi(cf, tol=min(epsilon.scale2(-3), two_pow(-20)))
    target = base.value.lo + epsilon
    m = 1
    while m <= max_m:
        # uniform over k >= m: head of omega_k up to m matches cf's terms;
        # everything after position m has terms <= bound
        u = phi_head_ub_bounded_tail(cf.terms_prefix(m), bound, prec)
        if u < target:
            return m
        m = m + 1 if m < 8 else m + max(1, m // 4)
    raise BudgetExhausted(f"no certified m <= {max_m}")


# -- the (m, N) perturbation search ------------------------------------------


def beta_expansion(prefix: Sequence[int], m: int, N: int) -> ContFrac:
    """[prefix, 1, ..., 1, N, 1, 1, ...] with N at 1-based position
    len(prefix) + m."""
    if m < 1 or N < 1:
        raise ValueError("need m >= 1, N >= 1")
    return ContFrac(tuple(prefix) + (1,) * (m - 1) + (N,), "ones")


def find_increase(prefix: Sequence[int], epsilon: Dyadic, m_min: int = 0,
                  budget: int = 200_000, eps_prime: Optional[Dyadic] = None,
                  t_max: int = 512) -> PerturbationResult:
    """Find (m, N), m > m_min, with
    Phi(omega) + eps < Phi(beta) < Phi(omega) + 2*eps  certified,
    where omega = [prefix, 1...] and beta places N after m-1 extra ones.

    Enumerates (m, N) by nondecreasing diagonal d = m + ceil(log2(N+1)),
    N ascending within a block with a deterministic multiplicative
    skip-ahead when Phi(beta) is still certifiably below the window.
    Also returns t such that ANY rewrite of beta beyond position
    len(prefix) + m + t keeps Phi > Phi(omega) - eps_prime (certified
    by the free-tail lower bound)."""
    prefix = tuple(prefix)
    if epsilon.sign <= 0:
        raise ValueError("epsilon must be positive")
    if eps_prime is None:
        eps_prime = epsilon
    tol = min(epsilon.scale2(-4), two_pow(-12))
    omega = ContFrac(prefix, "ones")
    phi_om = phi(omega, tol)
    lo_gate = phi_om.value.hi + epsilon       # need phi_beta.lo  > this
    hi_gate = phi_om.value.lo + epsilon.scale2(1)  # need phi_beta.hi < this
    steps = 0
    d = max(2, m_min + 2)
    while True:
        for m in range(max(1, m_min + 1), d):
            blk = d - m  # ceil(log2(N+1)) == blk
            n_lo = 1 if blk == 1 else (1 << (blk - 1))
            n_hi = (1 << blk) - 1
            N = n_lo
            while N <= n_hi:
                steps += 1
                if steps > budget:
                    raise BudgetExhausted(
                        f"find_increase exceeded {budget} candidate tests")
                beta = beta_expansion(prefix, m, N)
                phi_b = phi(beta, tol)
                if phi_b.value.lo > lo_gate and phi_b.value.hi < hi_gate:
                    t = _protect_tail(prefix, m, N, phi_om, eps_prime, t_max)
                    return PerturbationResult(m, N, t, phi_om, phi_b)
                if phi_b.value.hi < lo_gate:
                    # still short of the window: deterministic skip-ahead
                    N = max(N + 1, (3 * N + 1) // 2)
                else:
                    N += 1
        d += 1


def _protect_tail(prefix: Tuple[int, ...], m: int, N: int,
                  phi_om: BrjunoValue, eps_prime: Dyadic, t_max: int) -> int:
    target = phi_om.value.hi - eps_prime
    if target.sign <= 0:
        return 0
    fixed = prefix + (1,) * (m - 1) + (N,)
    t = 0
    while t <= t_max:
        lb = phi_head_lb_free_tail(fixed + (1,) * t)
        if lb > target:
            return t
        t = t + 1 if t < 8 else t + max(1, t // 3)
    raise BudgetExhausted(f"no protected t <= {t_max}")


# -- upsilon at rationals -----------------------------------------------------


def _ring_mul(a: list, b: list, q: int) -> list:
    """Multiply in Q[x]/(x^q - 1)."""
    out = [Fraction(0)] * q
    for i, ai in enumerate(a):
        if not ai:
            continue
        for j, bj in enumerate(b):
            if bj:
                k = i + j
                if k >= q:
                    k -= q
                out[k] += ai * bj
    return out


def _series_compose_step(w: list, lam: list, q: int, maxdeg: int) -> list:
    """W <- lam*W + W^2, truncated at degree maxdeg; W has zero constant
    term (list of ring elements, index = power of z)."""
    out = [[Fraction(0)] * q for _ in range(maxdeg + 1)]
    for i in range(1, len(w)):
        li = _ring_mul(lam, w[i], q)
        for k in range(q):
            out[i][k] += li[k]
    for i in range(1, len(w)):
        for j in range(1, len(w)):
            if i + j > maxdeg:
                break
            pij = _ring_mul(w[i], w[j], q)
            for k in range(q):
                out[i + j][k] += pij[k]
    return out


def quadratic_leading_coefficient(p: int, q: int) -> list:
    """Exact ring element A with P^q(z) = z + A z^{q+1} + ..., for
    P(z) = lam z + z^2, lam = x^p in Q[x]/(x^q-1)."""
    lam = [Fraction(0)] * q
    lam[p % q] = Fraction(1)
    maxdeg = q + 1
    w = [[Fraction(0)] * q for _ in range(maxdeg + 1)]
    w[1][0] = Fraction(1)  # W(z) = z
    for _ in range(q):
        w = _series_compose_step(w, lam, q, maxdeg)
    return w[q + 1]


def _ring_abs_ival(a: list, p: int, q: int, prec: int) -> RIval:
    """|sum_j a_j e^{2 pi i p j / q}| as an interval."""
    tau = pi_ival(prec).scale2(1)
    re = RIval.point(0)
    im = RIval.point(0)
    for j, aj in enumerate(a):
        if not aj:
            continue
        ang = tau * RIval.from_fraction(Fraction(p * j % q, q), prec)
        c = RIval.from_fraction(aj, prec)
        re = (re + c * ang.cos(prec)).round(prec)
        im = (im + c * ang.sin(prec)).round(prec)
    mag2 = (re * re + im * im).round(prec)
    if mag2.hi.sign <= 0:
        return RIval.point(0)
    if mag2.lo.sign < 0:
        mag2 = RIval(Dyadic(0), mag2.hi)
    return mag2.sqrt(prec)


def upsilon_at_rational(p: int, q: int, tol: Dyadic = two_pow(-34)) -> RIval:
    """The explicit value at p/q: Phi_trunc(p/q) + log L + log(2 pi)/q with
    L = |1/(q A)|^{1/q} and A the leading Taylor coefficient of the q-th
    iterate (exact truncated-series composition; |.| since the result is
    real)."""
    import math
    if q < 1 or not (0 <= p < q or (p == 0 and q == 1)):
        raise ValueError("need 0 <= p/q < 1")
    if math.gcd(p, q) != 1:
        raise ValueError("p/q must be in lowest terms")
    a_ring = quadratic_leading_coefficient(p, q)
    prec = max(96, 2 * tol_bits(tol) + 32)
    for _ in range(6):
        abs_a = _ring_abs_ival(a_ring, p, q, prec)
        if abs_a.lo.sign <= 0:
            if abs_a.hi < two_pow(-prec // 2):
                raise DegenerateCoefficient(f"A = 0 at p/q = {p}/{q}")
            prec *= 2
            continue
        if p == 0 and q == 1:
            phi_trunc = RIval.point(0)
        else:
            phi_trunc = phi(ContFrac.from_rational(Fraction(p, q)),
                            tol.scale2(-2)).value
        log_l = -(RIval.point(Dyadic(q)).log(prec) + abs_a.log(prec)).div(
            RIval.point(Dyadic(q)), prec)
        log_2pi = (pi_ival(prec).scale2(1)).log(prec)
        ups = (phi_trunc + log_l + log_2pi.div(RIval.point(Dyadic(q)), prec)).round(prec)
        if ups.width() <= tol:
            return ups
        prec *= 2
    return ups
