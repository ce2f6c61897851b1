import math
from fractions import Fraction

import pytest

from certdyn.brjuno import (BudgetExhausted, TailUnbounded, beta_expansion,
                            find_increase, phi, phi_head_lb_free_tail,
                            phi_split, quadratic_leading_coefficient,
                            tail_of_ones_bound, upsilon_at_rational)
from certdyn.contfrac import ContFrac
from certdyn.dyadic import Dyadic, two_pow
from certdyn.surd import Surd5

GOLDEN = (math.sqrt(5) - 1) / 2


def test_phi_golden_closed_form():
    # independent oracle: geometric series -ln(g)/(1-g)
    want = -math.log(GOLDEN) / (1 - GOLDEN)
    got = phi(ContFrac.golden(), two_pow(-24)).value
    assert float(got.lo) <= want <= float(got.hi) or abs(float(got.lo) - want) < 1e-14
    assert float(got.width()) < 2**-24


def test_phi_half_is_log2():
    got = phi(ContFrac.from_rational(Fraction(1, 2))).value
    assert abs(float(got.lo) - math.log(2)) < 1e-15


def _mp_phi_oracle(x0, nterms=300):
    """Independent high-precision direct summation of the Yoccoz sum."""
    import mpmath
    with mpmath.workdps(150):
        x = mpmath.mpf(x0) if not isinstance(x0, str) else mpmath.mpf(x0)
        total = mpmath.mpf(0)
        prod = mpmath.mpf(1)
        th = x
        for _ in range(nterms):
            total += prod * mpmath.log(1 / th)
            prod *= th
            th = mpmath.frac(1 / th)
        return float(total)


def test_phi_ones_tail_matches_direct_sum():
    # [2,3,1,1,...]: independent 150-digit direct summation
    import mpmath
    cf = ContFrac((2, 3), "ones")
    with mpmath.workdps(150):
        u, v = cf.value_surd().u, cf.value_surd().v
        x0 = mpmath.mpf(u.numerator) / u.denominator + \
            mpmath.mpf(v.numerator) / v.denominator * mpmath.sqrt(5)
        want = _mp_phi_oracle(x0)
    got = phi(cf, two_pow(-30)).value
    assert abs(float(got.lo) - want) < 1e-9


def test_phi_gen_tail_with_bound():
    # period-2 expansion [2,1,2,1,...] = (sqrt(3)-1)/2, generator + bound
    import mpmath
    cf = ContFrac((), "gen", gen=lambda i: 2 if i % 2 == 1 else 1, term_bound=2)
    got = phi(cf, two_pow(-16))
    assert float(got.tail_bound) <= 2**-16
    with mpmath.workdps(150):
        want = _mp_phi_oracle((mpmath.sqrt(3) - 1) / 2)
    lo = float(got.value.lo)
    hi = float(got.value.hi) + float(got.tail_bound)
    assert lo - 1e-9 <= want <= hi + 1e-9


def test_phi_unknown_tail_raises():
    with pytest.raises(TailUnbounded):
        phi(ContFrac((1, 2, 3), "unknown"))


def test_phi_divergence_in_inserted_term():
    # lem: Phi(beta^N) -> infinity as N grows
    vals = []
    for N in (10, 10**2, 10**4, 10**6):
        b = beta_expansion([1], 3, N)
        vals.append(float(phi(b).value.lo))
    assert vals == sorted(vals)
    assert vals[-1] > 4.0


def test_upsilon_rational_values():
    u0 = upsilon_at_rational(0, 1, two_pow(-40))
    assert abs(float(u0.lo) - math.log(2 * math.pi)) < 1e-9
    u12 = upsilon_at_rational(1, 2, two_pow(-40))
    assert abs(float(u12.lo) - math.log(2 * math.pi) / 2) < 1e-9


def test_upsilon_leading_coefficient_exact():
    # q=2: P(z) = -z + z^2, P^2 = z - 2 z^3 + z^4: A = -2 exactly
    a = quadratic_leading_coefficient(1, 2)
    assert sum(c * (-1) ** j for j, c in enumerate(a)) == -2
    # q=1: A = 1
    a = quadratic_leading_coefficient(0, 1)
    assert a[0] == 1


def test_upsilon_finite_and_real_small_denominators():
    for p, q in ((1, 3), (2, 3), (1, 4), (3, 4), (2, 5)):
        u = upsilon_at_rational(p, q, two_pow(-20))
        assert float(u.lo) == pytest.approx(float(u.hi), abs=1e-5)
        assert math.isfinite(float(u.lo))


def test_phi_split_golden():
    cf = ContFrac.golden()
    g = Surd5.golden()
    full = phi(cf, two_pow(-30)).value
    for (n, m) in ((0, 1), (1, 2), (2, 3)):
        minus, one = phi_split(cf, n, m)
        j = n + m
        want = float(g) ** (j - 1) * math.log(1 / float(g))
        assert abs(float(one.value.lo) - want) < 1e-10
        s = minus.value + one.value
        assert s.lo <= full.hi and full.lo <= s.hi


def test_find_increase_windows():
    for eps_str, lo, hi in (("0.5", 0.5, 1.0), ("0.25", 0.25, 0.5)):
        eps = Dyadic.parse(eps_str)
        r = find_increase([1], eps)
        gain_lo = float(r.phi_after.value.lo - r.phi_before.value.hi)
        gain_hi = float(r.phi_after.value.hi - r.phi_before.value.lo)
        assert float(eps) < gain_lo and gain_hi < 2 * float(eps)
        assert r.m >= 1 and r.N >= 1


def test_find_increase_respects_m_min():
    r = find_increase([1], Dyadic.parse("0.125"), m_min=4)
    assert r.m > 4


def test_find_increase_monotone_steps():
    # lem: Phi(beta^{N+1}) - Phi(beta^N) < eps for consecutive N at found m
    eps = Dyadic.parse("0.5")
    r = find_increase([1], eps)
    prev = phi(beta_expansion([1], r.m, max(1, r.N - 50)))
    violations = 0
    for N in range(max(2, r.N - 49), r.N + 50):
        cur = phi(beta_expansion([1], r.m, N))
        step = float(cur.value.hi - prev.value.lo)
        if step >= float(eps):
            violations += 1
        prev = cur
    assert violations == 0


def test_protected_tail_rewrites():
    # for the returned t, random tail rewrites beyond position keep Phi
    # above Phi(omega) - eps'
    import random
    eps = Dyadic.parse("0.5")
    r = find_increase([1], eps, eps_prime=Dyadic.parse("0.25"))
    base = float(r.phi_before.value.lo)
    fixed = (1,) + (1,) * (r.m - 1) + (r.N,) + (1,) * r.t
    rng = random.Random(11)
    for _ in range(40):
        tail = tuple(rng.randint(1, 10**rng.randint(1, 6)) for _ in range(6))
        gamma = ContFrac(fixed + tail, "ones")
        val = float(phi(gamma).value.hi)
        assert val > base - 0.25 - 1e-9


def test_free_tail_lower_bound_is_sound():
    import random
    rng = random.Random(5)
    for _ in range(20):
        fixed = tuple(rng.randint(1, 6) for _ in range(rng.randint(1, 6)))
        lb = phi_head_lb_free_tail(fixed)
        for _ in range(5):
            tail = tuple(rng.randint(1, 50) for _ in range(5))
            v = phi(ContFrac(fixed + tail, "ones")).value
            assert float(v.hi) >= float(lb) - 1e-12


def test_gauss_iterate_perturbation_estimates():
    # |ln(theta_j(beta^N)/theta_j(beta^{N+1}))| < 2^{j-L-m}/N for j <= L+m
    prefixes = ([1], [2, 1], [1, 3, 1])
    for prefix in prefixes:
        L = len(prefix)
        m = 5
        for N in (3, 17):
            bN = beta_expansion(prefix, m, N)
            bN1 = beta_expansion(prefix, m, N + 1)
            for j in range(1, L + m + 1):
                a = float(bN.shift(j - 1).value_surd())
                b = float(bN1.shift(j - 1).value_surd())
                assert abs(math.log(a / b)) < 2.0 ** (j - L - m) / N * (1 + 1e-9)


def test_tail_of_ones_bound():
    cf = ContFrac((2, 2, 2, 2, 2, 2), "ones")
    eps = Dyadic.parse("0.25")
    m = tail_of_ones_bound(cf, eps)
    base = float(phi(cf).value.hi)
    for k in range(m, m + 6):
        w = ContFrac(cf.terms_prefix(k), "ones")
        assert float(phi(w).value.lo) < base + 0.25
    # huge epsilon: immediate
    assert tail_of_ones_bound(ContFrac.golden(), Dyadic(10**6)) == 1
