"""Complex ball arithmetic and finite ball-union set representations.

A ``ComplexBall`` is a closed disk with exact dyadic center and radius.
Every derived operation returns a ball that contains the exact image of
every point of every input ball; centers are rounded at the working
precision and the rounding error is absorbed into the radius (outward
rounding contract).

A ``BallUnion`` is a finite union of closed balls; the empty union
encodes the empty set.  It is the universal set-approximation currency
of the package and serializes bit-exactly to JSON.
"""

from __future__ import annotations

import json
from typing import Iterable, Iterator, Optional, Sequence

from .dyadic import Dyadic, sqrt_down, sqrt_up, two_pow
from .ival import RIval

DEFAULT_PREC = 64


class ComplexBall:
    __slots__ = ("re", "im", "rad")

    def __init__(self, re: Dyadic, im: Dyadic, rad: Dyadic = Dyadic(0)):
        if rad.sign < 0:
            raise ValueError("ball radius must be >= 0")
        self.re = re
        self.im = im
        self.rad = rad

    @classmethod
    def from_ints(cls, re: int, im: int = 0, rad: int = 0) -> "ComplexBall":
        return cls(Dyadic(re), Dyadic(im), Dyadic(rad))

    @classmethod
    def from_floats(cls, re: float, im: float = 0.0, rad: float = 0.0) -> "ComplexBall":
        return cls(Dyadic.from_float(re), Dyadic.from_float(im), Dyadic.from_float(rad))

    def __repr__(self):
        return f"Ball({float(self.re):.6g}{float(self.im):+.6g}i, r={float(self.rad):.3g})"

    # -- exact geometric predicates ------------------------------------

    def center_dist_sq(self, other: "ComplexBall") -> Dyadic:
        return (self.re - other.re).square() + (self.im - other.im).square()

    def intersects(self, other: "ComplexBall") -> bool:
        s = self.rad + other.rad
        return self.center_dist_sq(other) <= s.square()

    def contains_ball(self, other: "ComplexBall") -> bool:
        """Closed containment: other subseteq self."""
        slack = self.rad - other.rad
        if slack.sign < 0:
            return False
        return other.center_dist_sq(self) <= slack.square()

    def contains_point(self, re: Dyadic, im: Dyadic) -> bool:
        d = (self.re - re).square() + (self.im - im).square()
        return d <= self.rad.square()

    def strictly_inside(self, other: "ComplexBall") -> bool:
        """self compactly contained in the interior of other."""
        slack = other.rad - self.rad
        if slack.sign <= 0:
            return False
        return self.center_dist_sq(other) < slack.square()

    def abs_ival(self, prec: int = DEFAULT_PREC) -> RIval:
        """Interval enclosing |z| over the ball."""
        c2 = self.re.square() + self.im.square()
        clo = sqrt_down(c2, prec)
        chi = sqrt_up(c2, prec)
        lo = clo - self.rad
        if lo.sign < 0:
            lo = Dyadic(0)
        return RIval(lo, chi + self.rad)

    def abs_ub(self, prec: int = DEFAULT_PREC) -> Dyadic:
        return self.abs_ival(prec).hi

    # -- outward-rounded arithmetic ------------------------------------

    def add(self, other: "ComplexBall", prec: int = DEFAULT_PREC) -> "ComplexBall":
        return _round_ball(self.re + other.re, self.im + other.im,
                           self.rad + other.rad, prec)

    def sub(self, other: "ComplexBall", prec: int = DEFAULT_PREC) -> "ComplexBall":
        return _round_ball(self.re - other.re, self.im - other.im,
                           self.rad + other.rad, prec)

    def neg(self) -> "ComplexBall":
        return ComplexBall(-self.re, -self.im, self.rad)

    def mul(self, other: "ComplexBall", prec: int = DEFAULT_PREC) -> "ComplexBall":
        a, b = self, other
        re = a.re * b.re - a.im * b.im
        im = a.re * b.im + a.im * b.re
        rad = (a.abs_ub(prec) * b.rad + b.abs_ub(prec) * a.rad + a.rad * b.rad)
        return _round_ball(re, im, rad, prec)

    def square(self, prec: int = DEFAULT_PREC) -> "ComplexBall":
        re = self.re.square() - self.im.square()
        im = (self.re * self.im).scale2(1)
        aub = self.abs_ub(prec)
        rad = (aub.scale2(1) + self.rad) * self.rad
        return _round_ball(re, im, rad, prec)

    def scale(self, k: Dyadic, prec: int = DEFAULT_PREC) -> "ComplexBall":
        return _round_ball(self.re * k, self.im * k, self.rad * abs(k), prec)

    def widen(self, extra: Dyadic) -> "ComplexBall":
        return ComplexBall(self.re, self.im, self.rad + extra)


def ball_mul(a: ComplexBall, b: ComplexBall, prec: int = DEFAULT_PREC) -> ComplexBall:
    """Product ball: contains {x*y : x in a, y in b}."""
    return a.mul(b, prec)


def _round_ball(re: Dyadic, im: Dyadic, rad: Dyadic, prec: int) -> ComplexBall:
    """Round center components to prec bits, absorbing the error outward."""
    re_r = re.round_down(prec)
    im_r = im.round_down(prec)
    err = abs(re - re_r) + abs(im - im_r)
    return ComplexBall(re_r, im_r, (rad + err).round_up(prec))


class BallUnion:
    """Finite union of closed dyadic balls; () encodes the empty set."""

    __slots__ = ("balls",)

    def __init__(self, balls: Iterable[ComplexBall] = ()):
        self.balls = tuple(balls)

    def __len__(self) -> int:
        return len(self.balls)

    def __iter__(self) -> Iterator[ComplexBall]:
        return iter(self.balls)

    def is_empty(self) -> bool:
        return not self.balls

    def __repr__(self):
        return f"BallUnion(<{len(self.balls)} balls>)"

    def bounding_radius(self, prec: int = DEFAULT_PREC) -> Dyadic:
        """Radius of a ball about 0 containing the union."""
        m = Dyadic(0)
        for b in self.balls:
            m = max(m, b.abs_ub(prec))
        return m

    def contains_point(self, re: Dyadic, im: Dyadic) -> bool:
        return any(b.contains_point(re, im) for b in self.balls)

    def dist_sq_point_lb(self, re: Dyadic, im: Dyadic) -> Dyadic:
        """Exact lower bound on squared distance from a point to the union:
        min over balls of (|p-c| - r)^2, as an exact dyadic computation at
        512-bit sqrt guard precision (0 when the point is inside)."""
        best: Optional[Dyadic] = None
        for b in self.balls:
            d2 = (b.re - re).square() + (b.im - im).square()
            if d2 <= b.rad.square():
                return Dyadic(0)
            # (sqrt(d2) - r)^2 = d2 - 2 r sqrt(d2) + r^2 >= d2 - 2 r ub + r^2
            ub = sqrt_up(d2, 96)
            v = d2 - (b.rad * ub).scale2(1) + b.rad.square()
            if v.sign < 0:
                v = Dyadic(0)
            if best is None or v < best:
                best = v
        if best is None:
            raise ValueError("distance to the empty union is undefined")
        return best

    # -- serialization -------------------------------------------------

    def to_json_obj(self) -> dict:
        def dy(d: Dyadic) -> dict:
            return {"m": str(d.man), "e": d.exp}

        return {"balls": [{"re": dy(b.re), "im": dy(b.im), "r": dy(b.rad)}
                          for b in self.balls]}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "BallUnion":
        def dy(o: dict) -> Dyadic:
            return Dyadic(int(o["m"]), int(o["e"]))

        return cls(ComplexBall(dy(b["re"]), dy(b["im"]), dy(b["r"]))
                   for b in obj["balls"])

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"), sort_keys=True)

    @classmethod
    def loads(cls, s: str) -> "BallUnion":
        return cls.from_json_obj(json.loads(s))


# -- Hausdorff distance ----------------------------------------------------


def hausdorff_distance(a: BallUnion, b: BallUnion,
                       tol: Dyadic = two_pow(-20)) -> RIval:
    """Enclosing interval for d_H(A, B), of width <= tol.

    d_H(A,B) = max(h(A,B), h(B,A)) with h the one-sided sup-of-dist
    deviation.  Each one-sided deviation is bracketed by best-first
    branch-and-bound over sub-balls of the source union; distances to the
    target union are exact dyadic computations over candidates selected
    by a (float-prefiltered, generously padded) spatial bucket index.
    """
    if a.is_empty() or b.is_empty():
        raise ValueError("hausdorff_distance requires nonempty unions")
    h_ab = _one_sided(a, b, tol.scale2(-1))
    h_ba = _one_sided(b, a, tol.scale2(-1))
    return RIval(max(h_ab.lo, h_ba.lo), max(h_ab.hi, h_ba.hi))


class _UnionIndex:
    """Spatial bucket index over a ball union for certified point-to-set
    distance intervals.  Bucketing/prefiltering uses floats with generous
    padding; the reported interval is computed with exact dyadics over
    every candidate that could attain the minimum."""

    def __init__(self, target: BallUnion, prec: int = 96):
        self.balls = target.balls
        self.prec = prec
        self.maxrad = max(float(b.rad) for b in self.balls)
        import math as _m
        span = max(1e-9, self.maxrad)
        self.cell = max(span, 1.0 / 16)
        self.buckets: dict = {}
        self.degenerate = False
        for b in self.balls:
            fx, fy = float(b.re), float(b.im)
            if not (abs(fx) < 1e100 and abs(fy) < 1e100):
                self.degenerate = True
                continue
            key = (_m.floor(fx / self.cell), _m.floor(fy / self.cell))
            self.buckets.setdefault(key, []).append(b)
        if self.buckets:
            keys = list(self.buckets)
            self._ilo = min(k[0] for k in keys)
            self._ihi = max(k[0] for k in keys)
            self._jlo = min(k[1] for k in keys)
            self._jhi = max(k[1] for k in keys)
        else:
            self.degenerate = True

    def _candidates(self, x: float, y: float) -> list:
        import math as _m
        if len(self.balls) <= 8:
            return list(self.balls)
        if self.degenerate or not (abs(x) < 1e100 and abs(y) < 1e100):
            return list(self.balls)
        ci = _m.floor(x / self.cell)
        cj = _m.floor(y / self.cell)
        best_ub = None
        ring = 0
        found: list = []
        max_ring = 2 + max(abs(self._ilo - ci), abs(self._ihi - ci),
                           abs(self._jlo - cj), abs(self._jhi - cj))
        while ring <= max_ring:
            new = []
            for i in range(ci - ring, ci + ring + 1):
                for j in range(cj - ring, cj + ring + 1):
                    if max(abs(i - ci), abs(j - cj)) != ring:
                        continue
                    new.extend(self.buckets.get((i, j), ()))
            for b in new:
                d = _m.hypot(float(b.re) - x, float(b.im) - y) - float(b.rad)
                if best_ub is None or d < best_ub:
                    best_ub = d
            found.extend(new)
            # all balls in farther rings have center-dist >= (ring-1)*cell;
            # stop once that provably exceeds the best upper bound
            if best_ub is not None and (ring - 1) * self.cell > best_ub + self.maxrad + 4 * self.cell:
                break
            ring += 1
        if best_ub is None:
            return list(self.balls)
        # keep every ball that could beat best_ub after float slop
        keep = []
        pad = 1e-9 + 4 * self.cell
        for b in found:
            d = _m.hypot(float(b.re) - x, float(b.im) - y) - float(b.rad)
            if d <= best_ub + pad:
                keep.append(b)
        return keep

    def dist_ival(self, re: Dyadic, im: Dyadic) -> RIval:
        cands = self._candidates(float(re), float(im))
        lo_best: Optional[Dyadic] = None
        hi_best: Optional[Dyadic] = None
        for t in cands:
            d2 = (t.re - re).square() + (t.im - im).square()
            d_lo = sqrt_down(d2, self.prec) - t.rad
            d_hi = sqrt_up(d2, self.prec) - t.rad
            if d_lo.sign < 0:
                d_lo = Dyadic(0)
            if d_hi.sign < 0:
                d_hi = Dyadic(0)
            if hi_best is None or d_hi < hi_best:
                hi_best = d_hi
            if lo_best is None or d_lo < lo_best:
                lo_best = d_lo
        assert lo_best is not None and hi_best is not None
        return RIval(lo_best, hi_best)


_SQRT2_UB = Dyadic(1449, -10)  # 1.41503… > sqrt(2)


def _one_sided(src: BallUnion, target: BallUnion, tol: Dyadic) -> RIval:
    """Bracket sup_{x in src} dist(x, target) to width <= tol.

    Pieces are (axis-aligned box, source ball) pairs; a box splits into
    four exactly-contained quadrants, so bounds cannot drift outward.
    Lower bounds come from exact witness points inside box-and-ball;
    upper bounds from exact far-corner distances to candidate target
    balls.  Source balls contained in one target ball contribute 0 and
    are pruned up front."""
    import heapq
    import itertools
    import math as _m

    index = _UnionIndex(target)
    counter = itertools.count()
    heap = []  # (-float ub, tiebreak, cx, cy, h, ball)
    lo = Dyadic(0)

    def dist_lo_exact(wx: Dyadic, wy: Dyadic) -> Dyadic:
        return index.dist_ival(wx, wy).lo

    def push(cx: Dyadic, cy: Dyadic, h: Dyadic, ball: ComplexBall):
        nonlocal lo
        # witness candidates inside box /\ ball: clamp of the ball center,
        # plus any box corner lying in the ball
        wx = min(max(ball.re, cx - h), cx + h)
        wy = min(max(ball.im, cy - h), cy + h)
        d2 = (wx - ball.re).square() + (wy - ball.im).square()
        if d2 > ball.rad.square():
            return  # box misses the source ball
        cands = index._candidates(float(cx), float(cy))
        corners = [(cx - h, cy - h), (cx - h, cy + h),
                   (cx + h, cy - h), (cx + h, cy + h)]
        wits = [(wx, wy)]
        for px, py in corners:
            if ball.contains_point(px, py):
                wits.append((px, py))
        # pick the float-farthest witness, certify it exactly
        best_w = max(wits, key=lambda w: min(
            _m.hypot(float(w[0]) - float(t.re), float(w[1]) - float(t.im))
            - float(t.rad) for t in cands))
        wd = dist_lo_exact(best_w[0], best_w[1])
        if wd > lo:
            lo = wd
        # upper bound: min over candidate balls of far-corner dist - radius
        ub: Optional[Dyadic] = None
        for t in cands:
            far2 = max((px - t.re).square() + (py - t.im).square()
                       for px, py in corners)
            v = sqrt_up(far2, 48) - t.rad
            if v.sign < 0:
                v = Dyadic(0)
            if ub is None or v < ub:
                ub = v
            if v.sign == 0:
                break
        assert ub is not None
        if ub > lo:
            heapq.heappush(heap, (-float(ub), next(counter), ub, cx, cy, h, ball))

    for b in src.balls:
        if any(t.contains_ball(b) for t in index._candidates(float(b.re), float(b.im))):
            continue  # whole source ball inside the target: sup contribution 0
        push(b.re, b.im, b.rad if b.rad.sign > 0 else Dyadic(1, -60), b)
    while heap:
        _, _, ub, cx, cy, h, ball = heap[0]
        if ub - lo <= tol:
            return RIval(lo, max(ub, lo))
        heapq.heappop(heap)
        hh = h.scale2(-1)
        for sx in (-1, 1):
            for sy in (-1, 1):
                push(cx + hh * sx, cy + hh * sy, hh, ball)
    return RIval(lo, lo)


# -- grid refinement --------------------------------------------------------


def refine(a: BallUnion, n: int) -> BallUnion:
    """Cover of A by radius-2^-n balls centered on the 2^-n grid.

    Includes a grid center g iff dist(g, A) <= (sqrt(2)/2) * 2^-n, which
    guarantees refine(A,n) >= A.  The output lies within Hausdorff
    distance (1 + sqrt(2)/2) * 2^-n of A; see the package notes for why
    the sharp constant exceeds 1 on this grid.
    """
    if n < 0:
        raise ValueError("resolution must be >= 0")
    if a.is_empty():
        return BallUnion()
    step = two_pow(-n)
    # threshold^2 = 1/2 * 2^-2n (exact dyadic)
    thr2 = two_pow(-2 * n - 1)
    out = []
    seen = set()
    for b in a.balls:
        reach = b.rad + step
        ilo = (b.re - reach).floor2(n)
        ihi = (b.re + reach).floor2(n) + 1
        jlo = (b.im - reach).floor2(n)
        jhi = (b.im + reach).floor2(n) + 1
        for i in range(ilo, ihi + 1):
            for j in range(jlo, jhi + 1):
                if (i, j) in seen:
                    continue
                g_re = Dyadic(i, -n)
                g_im = Dyadic(j, -n)
                d2 = (b.re - g_re).square() + (b.im - g_im).square()
                # dist(g, ball)^2 <= thr2  <=>  dist <= sqrt(thr2)
                if d2 <= b.rad.square():
                    ok = True
                else:
                    ub = sqrt_up(d2, 96)
                    gap = d2 - (b.rad * ub).scale2(1) + b.rad.square()
                    ok = gap <= thr2
                if ok:
                    seen.add((i, j))
                    out.append(ComplexBall(g_re, g_im, step))
    out.sort(key=lambda c: (c.re.to_fraction(), c.im.to_fraction()))
    return BallUnion(out)
