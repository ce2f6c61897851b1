import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from certdyn.balls import (BallUnion, ComplexBall, ball_mul,
                           hausdorff_distance, refine)
from certdyn.dyadic import Dyadic, two_pow

B = ComplexBall.from_ints


def test_point_product_exact():
    # (2,0) x (3,0) -> (6,0): exact point arithmetic
    p = ball_mul(B(2), B(3))
    assert p.re == 6 and p.im == 0 and p.rad == 0


def test_unit_balls_product_contains_unit_disk():
    # balls centered 0 radius 1: product must contain the disk of radius 1
    p = ball_mul(B(0, 0, 1), B(0, 0, 1))
    assert p.re == 0 and p.im == 0 and p.rad >= 1


def test_square_error_propagation():
    # center 1+i radius 2^-10, squared: derived oracle brute-forces the image
    # of sample points of the input ball and checks containment; the radius
    # contract (<= 2^-7) comes from |2 z r + r^2| <= (2*sqrt(2) + 2^-10)*2^-10.
    b = ComplexBall(Dyadic(1), Dyadic(1), two_pow(-10))
    sq = b.square(prec=64)
    assert abs(sq.re - 0) <= two_pow(-7)
    assert abs(sq.im - 2) <= two_pow(-7)
    assert sq.rad <= two_pow(-7)
    rng = random.Random(7)
    for _ in range(200):
        ang = rng.uniform(0, 2 * math.pi)
        t = rng.uniform(0, 1)
        zr = 1 + t * 2**-10 * math.cos(ang)
        zi = 1 + t * 2**-10 * math.sin(ang)
        wr, wi = zr * zr - zi * zi, 2 * zr * zi
        d2 = (Fraction(wr) - sq.re.to_fraction()) ** 2 + (
            Fraction(wi) - sq.im.to_fraction()) ** 2
        assert d2 <= (sq.rad.to_fraction() + Fraction(1, 2**40)) ** 2


coords = st.integers(-8, 8)


@settings(max_examples=60)
@given(coords, coords, coords, coords, st.integers(0, 3), st.integers(0, 3))
def test_mul_outward_rounding_soundness(ar, ai, br, bi, ra, rb):
    """Exact values of x*y for sampled x,y in the input balls lie in the
    output ball (spec invariant, randomized)."""
    a = ComplexBall(Dyadic(ar), Dyadic(ai), Dyadic(ra, -2))
    b = ComplexBall(Dyadic(br), Dyadic(bi), Dyadic(rb, -2))
    out = ball_mul(a, b, prec=48)
    rng = random.Random(ar * 31 + bi)
    for _ in range(20):
        # sample exact dyadic points inside each ball
        dx = Dyadic(rng.randint(-3, 3), -4) * Dyadic(ra, -2)
        dy = Dyadic(rng.randint(-3, 3), -4) * Dyadic(ra, -2)
        ex = Dyadic(rng.randint(-3, 3), -4) * Dyadic(rb, -2)
        ey = Dyadic(rng.randint(-3, 3), -4) * Dyadic(rb, -2)
        xr, xi = a.re + dx, a.im + dy
        yr, yi = b.re + ex, b.im + ey
        pr = xr * yr - xi * yi
        pi_ = xr * yi + xi * yr
        d2 = (pr - out.re).square() + (pi_ - out.im).square()
        assert d2 <= out.rad.square()


def test_hausdorff_identical():
    a = BallUnion([B(0, 0, 1)])
    d = hausdorff_distance(a, a, two_pow(-12))
    assert d.lo == 0 and d.hi <= two_pow(-12)


def test_hausdorff_disjoint_unit_balls():
    # B(0,1) vs B(3,1): exact distance 3 by center/radius geometry
    a = BallUnion([B(0, 0, 1)])
    b = BallUnion([B(3, 0, 1)])
    d = hausdorff_distance(a, b, two_pow(-10))
    assert d.contains(Dyadic(3))
    assert d.width() <= two_pow(-10)


def test_hausdorff_concentric():
    a = BallUnion([B(0, 0, 1)])
    b = BallUnion([B(0, 0, 2)])
    d = hausdorff_distance(a, b, two_pow(-10))
    assert d.contains(Dyadic(1))


def test_hausdorff_empty_error():
    with pytest.raises(ValueError):
        hausdorff_distance(BallUnion(), BallUnion([B(0)]))


@settings(max_examples=10, deadline=None)
@given(st.lists(st.tuples(coords, coords, st.integers(1, 4)), min_size=1, max_size=3),
       st.lists(st.tuples(coords, coords, st.integers(1, 4)), min_size=1, max_size=3),
       st.lists(st.tuples(coords, coords, st.integers(1, 4)), min_size=1, max_size=3))
def test_hausdorff_symmetry_and_triangle(la, lb, lc):
    tol = two_pow(-6)
    A = BallUnion([ComplexBall(Dyadic(r), Dyadic(i), Dyadic(w, -1)) for r, i, w in la])
    Bu = BallUnion([ComplexBall(Dyadic(r), Dyadic(i), Dyadic(w, -1)) for r, i, w in lb])
    C = BallUnion([ComplexBall(Dyadic(r), Dyadic(i), Dyadic(w, -1)) for r, i, w in lc])
    dab = hausdorff_distance(A, Bu, tol)
    dba = hausdorff_distance(Bu, A, tol)
    # symmetry up to enclosure widths
    assert dab.lo <= dba.hi and dba.lo <= dab.hi
    dac = hausdorff_distance(A, C, tol)
    dcb = hausdorff_distance(C, Bu, tol)
    # triangle inequality up to enclosure widths
    assert dab.lo <= dac.hi + dcb.hi


def test_refine_empty():
    assert refine(BallUnion(), 5).is_empty()


def test_refine_unit_disk_covers():
    a = BallUnion([B(0, 0, 1)])
    r = refine(a, 0)
    # cover: sampled points of A lie in the refinement
    for k in range(12):
        ang = 2 * math.pi * k / 12
        p_re = Dyadic.from_float(0.99 * math.cos(ang))
        p_im = Dyadic.from_float(0.99 * math.sin(ang))
        assert r.contains_point(p_re, p_im)
    d = hausdorff_distance(r, a, two_pow(-8))
    # sharp grid-cover constant: (1 + sqrt(2)/2) * 2^-n
    assert d.hi.to_fraction() <= Fraction(171, 100)


def test_refine_small_ball_count():
    # ball of radius 2^-3 at 0, n=3: derived oracle counts the grid centers
    # within sqrt(2)/2 * 2^-3 of the ball; output must match that rule
    a = BallUnion([ComplexBall(Dyadic(0), Dyadic(0), two_pow(-3))])
    r = refine(a, 3)
    expected = 0
    for i in range(-3, 4):
        for j in range(-3, 4):
            # dist(g, ball) = max(|g| - 1/8, 0) with |g| = sqrt(i^2+j^2)/8
            d2 = Fraction(i * i + j * j, 64)
            rad = Fraction(1, 8)
            if d2 <= rad**2:
                expected += 1
            else:
                # (sqrt(d2) - 1/8)^2 <= 1/128 ?
                lhs = d2 - 2 * rad * Fraction(math.isqrt((i * i + j * j) * 10**12), 8 * 10**6) + rad**2
                if lhs <= Fraction(1, 128):
                    expected += 1
    assert len(r) == expected
    assert len(r) <= 13


@settings(max_examples=8, deadline=None)
@given(st.lists(st.tuples(coords, coords, st.integers(0, 3)), min_size=1, max_size=2),
       st.integers(0, 2))
def test_refine_covers_and_close(lst, n):
    a = BallUnion([ComplexBall(Dyadic(r), Dyadic(i), Dyadic(w, -1)) for r, i, w in lst])
    ref = refine(a, n)
    assert not ref.is_empty()
    # containment of sampled source points
    rng = random.Random(n + len(lst))
    for b in a.balls:
        for _ in range(8):
            dx = Dyadic(rng.randint(-7, 7), -3) * b.rad
            dy_max2 = b.rad.square() - dx.square()
            if dy_max2.sign < 0:
                continue
            assert ref.contains_point(b.re + dx, b.im)
    d = hausdorff_distance(ref, a, two_pow(-6))
    bound = two_pow(-n) + two_pow(-n - 1) + two_pow(-n - 2)  # > (1+sqrt2/2) 2^-n
    assert d.hi <= bound


def test_json_roundtrip_bit_exact():
    a = BallUnion([
        ComplexBall(Dyadic(3, -2), Dyadic(-7, 5), Dyadic(1, -30)),
        ComplexBall(Dyadic(10**40 + 1), Dyadic(0), Dyadic(0)),
    ])
    s = a.dumps()
    b = BallUnion.loads(s)
    assert s == b.dumps()
    assert all(x.re == y.re and x.im == y.im and x.rad == y.rad
               for x, y in zip(a.balls, b.balls))
