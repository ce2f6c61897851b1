import math

import numpy as np
import pytest

from certdyn.balls import BallUnion, ComplexBall, hausdorff_distance
from certdyn.dyadic import Dyadic, two_pow
from certdyn.dynamics import (AttractingTrap, Certificate, DynContext,
                              NonRepellingEntry, SiegelCompanion, beta_bound_real,
                              build_petal, ball_sqrt, check_certificate,
                              escape_radius, julia_samples_quadratic,
                              make_machines, pullback, race)
from certdyn.roots import PolyExact

B = ComplexBall.from_ints


def dyb(x, y=0.0, r=0.0):
    return ComplexBall(Dyadic.from_float(x), Dyadic.from_float(y),
                       Dyadic.from_float(r))


def test_escape_radius_z2():
    f = PolyExact.quadratic(0)
    R = escape_radius(f)
    assert R == 2


def test_escape_radius_grows_with_c():
    r3 = escape_radius(PolyExact.quadratic(-3))
    r10 = escape_radius(PolyExact.quadratic(10))
    assert float(r3) >= 2.3 and float(r10) >= float(r3)
    # certified property: |z| >= R implies |z^2+c| >= 2|z| (sampled)
    for c, R in ((-3, r3), (10, r10)):
        for ang in range(8):
            z = float(R) * complex(math.cos(ang), math.sin(ang))
            assert abs(z * z + c) >= 2 * abs(z) - 1e-9


def test_beta_bound_matches_formula():
    b = beta_bound_real(Dyadic(-3))
    want = math.sqrt(13 / 4) + 0.5
    assert float(b.lo) <= want <= float(b.hi)


def test_ball_sqrt_contains_truth():
    import cmath
    for (x, y, r) in ((4.0, 0.0, 0.01), (1.0, 1.0, 0.05), (-2.0, 0.5, 0.01)):
        b = dyb(x, y, r)
        s = ball_sqrt(b)
        w = cmath.sqrt(complex(x, y))
        d = math.hypot(float(s.re) - w.real, float(s.im) - w.imag)
        assert d <= float(s.rad)


def test_pullback_z2_unit_disk():
    # p = z^2, S = closed B(0,4): p^-1(S) = B(0,2) within 2^-m
    f = PolyExact.quadratic(0)
    S = BallUnion([B(0, 0, 4)])
    out = pullback(f, S, 1, 4)
    d = hausdorff_distance(out, BallUnion([B(0, 0, 2)]), two_pow(-8))
    assert float(d.hi) <= 2 ** -4


def test_pullback_deeper_converges_to_unit_disk():
    f = PolyExact.quadratic(0)
    S = BallUnion([B(0, 0, 4)])
    out = pullback(f, S, 6, 4)
    # exact preimage radius 4^(1/2^6) = 1.0219: within 2^-4 of it
    want = 4.0 ** (1 / 2 ** 6)
    d = hausdorff_distance(out, BallUnion([dyb(0, 0, want)]), two_pow(-8))
    assert float(d.hi) <= 2 ** -4 + 1e-9


def test_pullback_empty():
    f = PolyExact.quadratic(0)
    assert pullback(f, BallUnion(), 3, 5).is_empty()


def test_certificate_json_roundtrip():
    cert = Certificate(
        nonrepelling=[NonRepellingEntry(1, "parabolic", [dyb(0.5, 0, 0.25)], (0, 1))],
        attracting_traps=[AttractingTrap(2, BallUnion([dyb(0, 0, 0.3), dyb(-1, 0, 0.3)]))],
        siegel_companion=SiegelCompanion(1, dyb(1.8, 0, 0.2)),
    )
    s = cert.dumps()
    back = Certificate.loads(s)
    assert back.dumps() == s


def test_check_certificate_basilica_trap():
    # z^2 - 1 with the attracting 2-cycle {0, -1}: trap built by hand
    f = PolyExact.quadratic(-1)
    trap = AttractingTrap(2, BallUnion([dyb(0, 0, 0.25), dyb(-1, 0, 0.25)]))
    cert = Certificate(attracting_traps=[trap])
    reports = check_certificate(f, cert)
    assert all(r["pass"] for r in reports)


def test_check_certificate_bad_trap():
    f = PolyExact.quadratic(0)
    # ball around the repelling fixed point 1 is not a trap
    trap = AttractingTrap(1, BallUnion([dyb(1, 0, 0.1)]))
    cert = Certificate(attracting_traps=[trap])
    reports = check_certificate(f, cert)
    assert not reports[0]["pass"]


def test_check_certificate_parabolic_multiplier():
    f = PolyExact.from_dyadics([(Dyadic(1, -2), Dyadic(0)), 0, 1])  # z^2+1/4
    good = Certificate(nonrepelling=[
        NonRepellingEntry(1, "parabolic", [dyb(0.5, 0, 0.25)], (0, 1))])
    assert all(r["pass"] for r in check_certificate(f, good))
    bad = Certificate(nonrepelling=[
        NonRepellingEntry(1, "parabolic", [dyb(0.5, 0, 0.25)], (1, 3))])
    assert not all(r["pass"] for r in check_certificate(f, bad))


def test_julia_samples_on_unit_circle():
    c = ComplexBall(Dyadic(0), Dyadic(0))
    pts = julia_samples_quadratic(c, depth=8, n=5)
    assert pts
    for p in pts:
        assert abs(math.hypot(float(p.re), float(p.im)) - 1) < 2 ** -7
    # density: at depth 12 the points should 0.1-cover the circle
    pts = julia_samples_quadratic(c, depth=12, n=5)
    for k in range(40):
        ang = 2 * math.pi * k / 40
        tx, ty = math.cos(ang), math.sin(ang)
        d = min(math.hypot(float(p.re) - tx, float(p.im) - ty) for p in pts)
        assert d < 0.1


def test_petal_z2_plus_quarter():
    # f = z^2 + 1/4 at p = 1/2: f(z) = z + (z-1/2)^2: a = 1, n = 1
    f = PolyExact.from_dyadics([(Dyadic(1, -2), Dyadic(0)), 0, 1])
    petals = build_petal(f, dyb(0.5, 0, 0.25), 1, (0, 1), k=4)
    pet = petals[0]
    assert pet.n_directions == 1
    assert abs(float(pet.a_coeff.re) - 1) < 1e-9
    # c = -1/(n a) = -1: kappa(z) = -1/(z - 1/2)
    assert abs(float(pet.parabolic_point.re) - 0.5) < 1e-12
    # region is a disk strictly left of 1/2 (attracting direction nu = -1)
    ball = pet.region.balls[0]
    assert float(ball.re) + float(ball.rad) < 0.5
    # petal invariance: f(petal ball) inside the petal (up to the cusp)
    img = f.eval_ball(ball, 128)
    assert img.rad - ball.rad < two_pow(-8)
    # certified forward invariance of the exact petal disk: check sampled
    # points map back into the region union the parabolic point
    for t in range(12):
        ang = 2 * math.pi * t / 12
        zx = float(ball.re) + 0.98 * float(ball.rad) * math.cos(ang)
        zy = float(ball.im) + 0.98 * float(ball.rad) * math.sin(ang)
        w = complex(zx, zy) ** 2 + 0.25
        # image either inside the petal disk or closer to the cusp
        din = math.hypot(w.real - float(ball.re), w.imag - float(ball.im))
        assert din < float(ball.rad) * (1 + 1e-9) or abs(w - 0.5) < abs(complex(zx, zy) - 0.5)


def test_petal_monotone_levels():
    f = PolyExact.from_dyadics([(Dyadic(1, -2), Dyadic(0)), 0, 1])
    p3 = build_petal(f, dyb(0.5, 0, 0.25), 1, (0, 1), k=3)[0]
    p4 = build_petal(f, dyb(0.5, 0, 0.25), 1, (0, 1), k=4)[0]
    b3, b4 = p3.region.balls[0], p4.region.balls[0]
    assert b4.contains_ball(b3)


def test_machines_z2_far_exterior():
    ctx = DynContext(PolyExact.quadratic(0), Certificate.empty(), 5,
                     c_ball=ComplexBall(Dyadic(0), Dyadic(0)))
    machines = make_machines(ctx, (Dyadic(3), Dyadic(0)))
    v, idx = race(machines, 30)
    assert v == 0 and idx == 0  # m_ext


def test_machines_z2_on_julia():
    ctx = DynContext(PolyExact.quadratic(0), Certificate.empty(), 5,
                     c_ball=ComplexBall(Dyadic(0), Dyadic(0)))
    machines = make_machines(ctx, (Dyadic(1), Dyadic(0)))
    v, idx = race(machines, 30)
    assert v == 1 and idx == 1  # m_jul


def test_machines_z2_attracting_center():
    cert = Certificate(attracting_traps=[
        AttractingTrap(1, BallUnion([dyb(0, 0, 0.25)]))])
    ctx = DynContext(PolyExact.quadratic(0), cert, 5,
                     c_ball=ComplexBall(Dyadic(0), Dyadic(0)))
    machines = make_machines(ctx, (Dyadic(0), Dyadic(0)))
    v, idx = race(machines, 30)
    assert v == 1 and idx == 2  # m_attr


def test_machines_parabolic_basin():
    f = PolyExact.from_dyadics([(Dyadic(1, -2), Dyadic(0)), 0, 1])
    cert = Certificate(nonrepelling=[
        NonRepellingEntry(1, "parabolic", [dyb(0.5, 0, 0.25)], (0, 1))])
    ctx = DynContext(f, cert, 4)
    # a point in the parabolic basin: 0 (critical orbit converges to 1/2)
    machines = make_machines(ctx, (Dyadic(0), Dyadic(0)))
    v, idx = race(machines, 40)
    assert v == 1 and idx == 3  # m_par


def test_one_sidedness_on_grid_z2_and_basilica():
    # 200 grid points; escape-time oracle with analytic knowledge:
    # K(z^2) = unit disk; K(z^2-1) via high-iteration escape test
    for c, in_k in ((0.0, lambda z: abs(z) <= 1.0),
                    (-1.0, None)):
        f = PolyExact.quadratic(Dyadic.from_float(c))
        cert = Certificate.empty()
        if c == -1.0:
            cert = Certificate(attracting_traps=[
                AttractingTrap(2, BallUnion([dyb(0, 0, 0.25), dyb(-1, 0, 0.25)]))])
        ctx = DynContext(f, cert, 4, c_ball=dyb(c))
        rng = np.random.RandomState(5)
        for _ in range(100):
            x = rng.uniform(-2.2, 2.2)
            y = rng.uniform(-2.2, 2.2)
            d = (Dyadic.from_float(round(x * 64) / 64),
                 Dyadic.from_float(round(y * 64) / 64))
            machines = make_machines(ctx, d)
            v, idx = race(machines, 8)
            if v is None:
                continue
            zx, zy = float(d[0]), float(d[1])
            if in_k is not None:
                member = in_k(complex(zx, zy))
            else:
                z = complex(zx, zy)
                member = True
                for _ in range(3000):
                    z = z * z + c
                    if abs(z) > 4:
                        member = False
                        break
            dist_scale = 2.0 ** -4
            if v == 0:
                # verdict 0 must only appear for points off K by > 2^-n
                assert not member or min_dist_to_k(zx, zy, c) > dist_scale
            if v == 1:
                # verdict 1 must only appear within 2 * 2^-n of K
                assert member or min_dist_to_k(zx, zy, c) <= 2 * dist_scale


def min_dist_to_k(x, y, c):
    """Crude certified-enough distance lower bound via escape time of a
    small sample grid around (x, y)."""
    best = math.inf
    for dx in (-0.05, 0, 0.05):
        for dy in (-0.05, 0, 0.05):
            z = complex(x + dx, y + dy)
            w = z
            bounded = True
            for _ in range(3000):
                w = w * w + c
                if abs(w) > 4:
                    bounded = False
                    break
            if bounded:
                best = min(best, math.hypot(dx, dy))
    return best
