import math
import random
from fractions import Fraction

import pytest

from certdyn.balls import ComplexBall
from certdyn.dyadic import Dyadic, two_pow
from certdyn.roots import (PolyExact, PrecisionExhausted, locate_roots,
                           periodic_orbits)

B = ComplexBall.from_ints


def ball(re, im=0.0, rad=0.0):
    return ComplexBall(Dyadic.from_float(re), Dyadic.from_float(im),
                       Dyadic.from_float(rad))


def test_locate_roots_z2_minus_z():
    Q = PolyExact.from_dyadics([0, -1, 1])  # z^2 - z
    roots = locate_roots(Q, B(0, 0, 10), 20)
    assert len(roots) == 2
    centers = sorted((float(r.re), float(r.im)) for r in roots)
    assert abs(centers[0][0] - 0) < 2**-20 and abs(centers[1][0] - 1) < 2**-20
    assert all(r.rad <= two_pow(-20) for r in roots)


def test_locate_roots_cube_root_of_unity_region():
    Q = PolyExact.from_dyadics([-1, 0, 0, 1])  # z^3 - 1
    roots = locate_roots(Q, ball(1, 0, 0.1), 10)
    assert len(roots) == 1
    assert abs(float(roots[0].re) - 1) < 2**-10


def test_locate_roots_cluster():
    # (z - 2^-5)(z - 2^-5 - 2^-20): two roots 2^-20 apart, n = 10
    a = Fraction(1, 32)
    b = a + Fraction(1, 1 << 20)
    # z^2 - (a+b) z + ab
    Q = PolyExact.from_dyadics([
        (Dyadic.from_fraction(a * b), Dyadic(0)),
        (Dyadic.from_fraction(-(a + b)), Dyadic(0)),
        (Dyadic(1), Dyadic(0)),
    ])
    roots = locate_roots(Q, B(0, 0, 2), 10)
    assert 1 <= len(roots) <= 2
    for r in roots:
        assert r.rad <= two_pow(-10)
        # within 2^-10 of the cluster
        assert min(abs(float(r.re) - float(a)), abs(float(r.re) - float(b))) < 2**-10


def test_locate_roots_random_constructed():
    rng = random.Random(3)
    for _ in range(6):
        deg = rng.randint(2, 6)
        true_roots = [complex(rng.randint(-4, 4), rng.randint(-4, 4)) / 2
                      for _ in range(deg)]
        coeffs = [1.0 + 0j]
        for r in true_roots:
            coeffs = [a - r * b for a, b in
                      zip(coeffs + [0j], [0j] + coeffs)]
        coeffs.reverse()  # lowest first
        Q = PolyExact.from_dyadics([(c.real, c.imag) for c in coeffs])
        found = locate_roots(Q, B(0, 0, 8), 12)
        for tr in true_roots:
            d = min(math.hypot(float(f.re) - tr.real, float(f.im) - tr.imag)
                    for f in found)
            assert d < 2**-12 + 1e-12


def test_periodic_orbits_z2_period1():
    f = PolyExact.quadratic(0)
    recs = periodic_orbits(f, 1, B(0, 0, 3), 16)
    kinds = {}
    for rec in recs:
        kinds[round(float(rec.points[0].re))] = rec.kind
    assert kinds[0] == "super-attracting"
    assert kinds[1] == "repelling"
    lam = [r for r in recs if round(float(r.points[0].re)) == 1][0]
    assert abs(float(lam.multiplier.re) - 2) < 1e-9


def test_periodic_orbits_z2_period2():
    f = PolyExact.quadratic(0)
    recs = periodic_orbits(f, 2, B(0, 0, 3), 16)
    two = [r for r in recs if r.period == 2]
    assert len(two) == 1
    orbit = two[0]
    assert orbit.kind == "repelling"
    # multiplier 4 z1 z2 = 4 for the primitive cube-roots-of-unity pair,
    # within the enclosure width
    slack = float(orbit.multiplier.rad) + 1e-9
    assert abs(float(orbit.multiplier.re) - 4) <= slack
    assert abs(float(orbit.multiplier.im)) <= slack
    # orbit closure: f(points[i]) meets points[i+1 mod 2]
    for i in range(2):
        img = f.eval_ball(orbit.points[i])
        assert img.intersects(orbit.points[(i + 1) % 2])


def test_periodic_orbits_parabolic_double_root():
    f = PolyExact.from_dyadics([(Dyadic(1, -2), Dyadic(0)), 0, 1])  # z^2 + 1/4
    recs = periodic_orbits(f, 1, B(0, 0, 3), 14)
    assert len(recs) == 1
    rec = recs[0]
    assert rec.kind == "indifferent-unresolved"
    assert float(rec.points[0].re) == 0.5
    assert abs(float(rec.multiplier.re) - 1) < 1e-9


def test_basilica_attracting_two_cycle():
    f = PolyExact.quadratic(-1)
    recs = periodic_orbits(f, 2, B(0, 0, 3), 16)
    two = [r for r in recs if r.period == 2]
    assert len(two) == 1
    assert two[0].kind == "super-attracting" or two[0].kind == "attracting"
    pts = sorted(round(float(p.re)) for p in two[0].points)
    assert pts == [-1, 0]
    # {0,-1}: multiplier = 2*0 * 2*(-1) = 0: exact roots make it super
    assert two[0].kind == "super-attracting"


def test_orbit_multiplier_vs_symbolic_chain_rule():
    # quadratic with known 3-cycle structure: c = -1.75 has a real 3-cycle
    f = PolyExact.from_dyadics([(Dyadic(-7, -2), Dyadic(0)), 0, 1])
    recs = periodic_orbits(f, 3, B(0, 0, 3), 14)
    three = [r for r in recs if r.period == 3]
    assert three
    for rec in three:
        # chain rule oracle: product of 2*z_i over high-precision floats
        prod = 1.0
        for p in rec.points:
            prod *= 2 * complex(float(p.re), float(p.im))
        got = complex(float(rec.multiplier.re), float(rec.multiplier.im))
        assert abs(prod - got) < 1e-3 + float(rec.multiplier.rad) * 8
