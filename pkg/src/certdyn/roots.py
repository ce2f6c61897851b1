"""Certified localization of polynomial roots in dyadic balls, and
enumeration/classification of periodic orbits with multiplier enclosures.

Roots are isolated by exclusion subdivision (discard a box when a ball
evaluation of Q excludes 0), surviving boxes are clustered, and each
cluster ball is *certified* to contain a root: by exact evaluation when
a snapped dyadic point is an exact root, by an interval Newton
contraction for simple roots, or by a certified winding number on a
circle around the cluster (sound for multiple roots).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import kern
from .balls import ComplexBall, _round_ball
from .dyadic import Dyadic, two_pow
from .ival import RIval


from .errors import (BudgetExhausted, CertificateInconsistent,
                     PrecisionExhausted)


class PolyExact:
    """Polynomial with complex-ball coefficient enclosures, lowest degree
    first.  The leading coefficient ball must exclude 0."""

    __slots__ = ("coeffs", "_float_view")

    def __init__(self, coeffs: Sequence[ComplexBall]):
        coeffs = list(coeffs)
        while len(coeffs) > 1 and _ball_is_zero(coeffs[-1]):
            coeffs.pop()
        lead = coeffs[-1]
        if len(coeffs) > 1 and lead.abs_ival().lo.sign <= 0:
            raise ValueError("leading coefficient ball must exclude 0")
        self.coeffs = tuple(coeffs)
        self._float_view = None

    @classmethod
    def from_dyadics(cls, vals: Sequence) -> "PolyExact":
        out = []
        for v in vals:
            if isinstance(v, ComplexBall):
                out.append(v)
            elif isinstance(v, tuple):
                out.append(ComplexBall(_dy(v[0]), _dy(v[1])))
            else:
                out.append(ComplexBall(_dy(v), Dyadic(0)))
        return cls(out)

    @classmethod
    def quadratic(cls, c_re, c_im=0) -> "PolyExact":
        """z^2 + c."""
        return cls.from_dyadics([(c_re, c_im), 0, 1])

    @classmethod
    def siegel_quadratic(cls, lam: ComplexBall) -> "PolyExact":
        """z^2 + lam*z."""
        one = ComplexBall(Dyadic(1), Dyadic(0))
        zero = ComplexBall(Dyadic(0), Dyadic(0))
        return cls([zero, lam, one])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_exact(self) -> bool:
        return all(c.rad.sign == 0 for c in self.coeffs)

    def derivative(self) -> "PolyExact":
        d = [self.coeffs[k].scale(Dyadic(k)) for k in range(1, len(self.coeffs))]
        return PolyExact(d if d else [ComplexBall(Dyadic(0), Dyadic(0))])

    def eval_ball(self, z: ComplexBall, prec: int = 96) -> ComplexBall:
        acc = self.coeffs[-1]
        for k in range(len(self.coeffs) - 2, -1, -1):
            acc = acc.mul(z, prec).add(self.coeffs[k], prec)
        return acc

    def eval_exact_zero(self, re: Dyadic, im: Dyadic) -> bool:
        """Exact test Q(re+im*i) == 0; requires exact coefficients."""
        if not self.is_exact():
            return False
        ar, ai = Dyadic(0), Dyadic(0)
        for k in range(len(self.coeffs) - 1, -1, -1):
            ar, ai = (ar * re - ai * im + self.coeffs[k].re,
                      ar * im + ai * re + self.coeffs[k].im)
        return ar.is_zero() and ai.is_zero()

    def float_view(self):
        """(coef_r, coef_i, coef_rad) highest-first float64 arrays; the
        float conversion error is absorbed into the radii (outward)."""
        if self._float_view is None:
            n = len(self.coeffs)
            cr = np.empty(n)
            ci = np.empty(n)
            crad = np.empty(n)
            for k, c in enumerate(self.coeffs):
                i = n - 1 - k
                fr = float(c.re)
                fi = float(c.im)
                err_r = abs(c.re - Dyadic.from_float(fr))
                err_i = abs(c.im - Dyadic.from_float(fi))
                cr[i] = fr
                ci[i] = fi
                crad[i] = float(((c.rad + err_r + err_i).round_up(53))) * (1 + 1e-15)
            self._float_view = (cr, ci, crad)
        return self._float_view

    def mul(self, other: "PolyExact", prec: int = 96) -> "PolyExact":
        out = [ComplexBall(Dyadic(0), Dyadic(0))
               for _ in range(self.degree + other.degree + 1)]
        for i, a in enumerate(self.coeffs):
            if _ball_is_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                if _ball_is_zero(b):
                    continue
                out[i + j] = out[i + j].add(a.mul(b, prec), prec)
        return PolyExact(out)

    def add_scalar(self, c: ComplexBall, prec: int = 96) -> "PolyExact":
        cs = list(self.coeffs)
        cs[0] = cs[0].add(c, prec)
        return PolyExact(cs)

    def compose(self, inner: "PolyExact", prec: int = 96) -> "PolyExact":
        """self(inner(z)) by Horner over the outer coefficients."""
        acc = PolyExact([self.coeffs[-1]])
        for k in range(len(self.coeffs) - 2, -1, -1):
            acc = acc.mul(inner, prec).add_scalar(self.coeffs[k], prec)
        return PolyExact(acc.coeffs)

    def iterate(self, j: int, prec: int = 96) -> "PolyExact":
        """Coefficients of the j-th iterate self^(j)."""
        if j < 1:
            raise ValueError("iterate count must be >= 1")
        acc = self
        for _ in range(j - 1):
            acc = self.compose(acc, prec)
        return acc

    def minus_z(self, prec: int = 96) -> "PolyExact":
        cs = list(self.coeffs)
        while len(cs) < 2:
            cs.append(ComplexBall(Dyadic(0), Dyadic(0)))
        one = ComplexBall(Dyadic(1), Dyadic(0))
        cs[1] = cs[1].sub(one, prec)
        return PolyExact(cs)

    def __repr__(self):
        return f"PolyExact(deg={self.degree})"


def _dy(v) -> Dyadic:
    if isinstance(v, Dyadic):
        return v
    if isinstance(v, int):
        return Dyadic(v)
    if isinstance(v, float):
        return Dyadic.from_float(v)
    if isinstance(v, str):
        return Dyadic.parse(v)
    raise TypeError(f"cannot coerce {type(v).__name__} to Dyadic")


def _ball_is_zero(b: ComplexBall) -> bool:
    return b.re.is_zero() and b.im.is_zero() and b.rad.is_zero()


# -- subdivision root isolation ------------------------------------------------


_SQ2_F = 0.7071067811865477 * (1 + 4e-16)  # >= sqrt(2)/2


def locate_roots(Q: PolyExact, region: ComplexBall, n: int,
                 max_boxes: int = 2_000_000) -> List[ComplexBall]:
    """Certified root localization: each returned ball has radius <= 2^-n
    and contains at least one root of Q; every root of Q in the region is
    within 2^-n of some returned center; returned balls stay within the
    region inflated by 2^-n."""
    if n < 0:
        raise ValueError("precision exponent must be >= 0")
    target = 2.0 ** -n
    cx0, cy0 = float(region.re), float(region.im)
    half0 = float(region.rad) * (1 + 1e-12) + 0.75 * target
    cr, ci, crad = Q.float_view()

    boxes = np.array([[cx0, cy0, half0]])
    # subdivide until boxes are small; keep boxes whose Q-ball contains 0
    # and which are not provably outside the (slightly inflated) region
    reach = float(region.rad) + 0.6 * target
    while boxes.shape[0] and boxes[0, 2] > target / 4:
        h = boxes[0, 2]
        quarters = []
        for sx in (-1.0, 1.0):
            for sy in (-1.0, 1.0):
                nb = boxes.copy()
                nb[:, 0] += sx * h / 2
                nb[:, 1] += sy * h / 2
                nb[:, 2] = h / 2
                quarters.append(nb)
        boxes = np.concatenate(quarters, axis=0)
        if boxes.shape[0] > max_boxes:
            raise BudgetExhausted(f"subdivision exceeded {max_boxes} boxes")
        dx = boxes[:, 0] - cx0
        dy = boxes[:, 1] - cy0
        halfdiag = boxes[:, 2] * (_SQ2_F * 2.0)
        in_region = dx * dx + dy * dy <= (reach + halfdiag) ** 2
        boxes = boxes[in_region]
        if boxes.shape[0] == 0:
            break
        rad = boxes[:, 2] * (_SQ2_F * 2.0)
        wr, wi, wrad = kern.poly_eval(cr, ci, crad, boxes[:, 0], boxes[:, 1], rad)
        keep = wr * wr + wi * wi <= wrad * wrad * (1 + 1e-12)
        boxes = boxes[keep]

    if boxes.shape[0] == 0:
        return []

    clusters = _cluster_boxes(boxes)
    out = []
    for (cx, cy, r) in clusters:
        ball = _certify_cluster(Q, cx, cy, r, n)
        out.append(ball)
    out.sort(key=lambda b: (b.re.to_fraction(), b.im.to_fraction()))
    return out


def _cluster_boxes(boxes: np.ndarray) -> List[Tuple[float, float, float]]:
    """Union-find clustering of touching boxes (uniform size)."""
    h = boxes[0, 2]
    cell = {}
    for idx in range(boxes.shape[0]):
        key = (math.floor(boxes[idx, 0] / (2 * h)),
               math.floor(boxes[idx, 1] / (2 * h)))
        cell.setdefault(key, []).append(idx)
    parent = list(range(boxes.shape[0]))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for (i, j), members in cell.items():
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                for other in cell.get((i + di, j + dj), ()):
                    for m in members:
                        if m < other and _touches(boxes, m, other):
                            union(m, other)
    groups = {}
    for idx in range(boxes.shape[0]):
        groups.setdefault(find(idx), []).append(idx)
    out = []
    for members in groups.values():
        xs = boxes[members, 0]
        ys = boxes[members, 1]
        cx = (xs.min() + xs.max()) / 2
        cy = (ys.min() + ys.max()) / 2
        r = max((xs.max() - xs.min()), (ys.max() - ys.min())) / 2 + h * 1.5
        out.append((cx, cy, r))
    return out


def _touches(boxes, a, b) -> bool:
    h = boxes[a, 2] + boxes[b, 2]
    return (abs(boxes[a, 0] - boxes[b, 0]) <= h * 1.001
            and abs(boxes[a, 1] - boxes[b, 1]) <= h * 1.001)


def _certify_cluster(Q: PolyExact, cx: float, cy: float, r: float, n: int
                     ) -> ComplexBall:
    """Produce a certified ball of radius <= 2^-n around the cluster."""
    target = two_pow(-n)
    # exact snap: try the nearest multiples of 2^-k for small k
    if Q.is_exact():
        for k in (0, 1, 2, 3, 4, 6, 8, 12, 20, 32):
            sre = Dyadic(round(cx * (1 << k)), -k)
            sim = Dyadic(round(cy * (1 << k)), -k)
            if Q.eval_exact_zero(sre, sim):
                d = math.hypot(float(sre) - cx, float(sim) - cy)
                if d <= r + float(target) / 4:
                    return ComplexBall(sre, sim, Dyadic(0))
    refined = False
    if r > float(target):
        # float exclusion bottomed out (e.g. a nearly-degenerate double
        # root); re-subdivide this cluster with exact ball arithmetic
        cx, cy, r = _refine_cluster_exact(Q, cx, cy, r, n)
        refined = True
    ball = ComplexBall(Dyadic.from_float(cx), Dyadic.from_float(cy),
                       Dyadic.from_float(r * (1 + 1e-12)))
    if ball.rad > target:
        raise PrecisionExhausted(
            f"root cluster of radius {r:.3g} exceeds the target scale 2^-{n}")
    # interval Newton certification for simple roots
    for factor in (1.0, 1.5, 2.5):
        test = ComplexBall(ball.re, ball.im,
                           Dyadic.from_float(min(r * factor, float(target))))
        if _newton_contracts(Q, test):
            return test
    # certified winding number for clusters / multiple roots; evaluate a
    # Taylor shift to the cluster center so local values are not drowned
    # by the interval dependency of the global coefficients
    S = taylor_shift(Q, ComplexBall(ball.re, ball.im), 192)
    for factor in (1.5, 2.0, 3.0):
        rho = min(r * factor + float(target) / 8, float(target))
        w = _winding_number(S, 0.0, 0.0, rho)
        if w is not None and w >= 1:
            return ComplexBall(ball.re, ball.im, Dyadic.from_float(rho))
    raise PrecisionExhausted(
        f"cannot certify a root near ({cx:.6g},{cy:.6g}) at scale 2^-{n}")


def taylor_shift(Q: PolyExact, z0: ComplexBall, prec: int = 128) -> PolyExact:
    """Coefficients of Q(z0 + w) as a polynomial in w (repeated synthetic
    division with ball arithmetic)."""
    b = list(Q.coeffs)
    deg = len(b) - 1
    for i in range(deg):
        for j in range(deg - 1, i - 1, -1):
            b[j] = b[j].add(b[j + 1].mul(z0, prec), prec)
    return PolyExact(b)


def _refine_cluster_exact(Q: PolyExact, cx: float, cy: float, r: float, n: int
                          ) -> Tuple[float, float, float]:
    """Subdivide a stuck cluster with exact ball evaluation at escalating
    precision until it fits the target scale (or fail honestly).  The
    polynomial is Taylor-shifted to the cluster center first, so that the
    local coefficients reflect the local behavior (otherwise the interval
    dependency problem makes exclusion impossible near degenerate roots)."""
    target = 2.0 ** -n
    ox = Dyadic.from_float(cx)
    oy = Dyadic.from_float(cy)
    for prec in (160, 320, 640):
        S = taylor_shift(Q, ComplexBall(ox, oy), prec)
        boxes = [(Dyadic(0), Dyadic(0), Dyadic.from_float(r * (1 + 1e-9)))]
        while boxes and float(boxes[0][2]) > target / 16:
            nxt = []
            for (bx, by, h) in boxes:
                hh = h.scale2(-1)
                for sx in (-1, 1):
                    for sy in (-1, 1):
                        ncx = bx + hh * sx
                        ncy = by + hh * sy
                        bb = ComplexBall(ncx, ncy, hh + hh.scale2(-1))
                        img = S.eval_ball(bb, prec)
                        if (img.re.square() + img.im.square()) <= img.rad.square():
                            nxt.append((ncx, ncy, hh))
                if len(nxt) > 100_000:
                    raise BudgetExhausted("exact cluster refinement blow-up")
            boxes = nxt
        if not boxes:
            # every sub-box excluded: impossible for a true cluster; treat
            # as precision failure of the outer float pass
            raise PrecisionExhausted("cluster dissolved under exact refinement")
        xs = [float(b[0]) for b in boxes]
        ys = [float(b[1]) for b in boxes]
        h = float(boxes[0][2])
        ncx = (min(xs) + max(xs)) / 2 + float(ox)
        ncy = (min(ys) + max(ys)) / 2 + float(oy)
        nr = max(max(xs) - min(xs), max(ys) - min(ys)) / 2 + h * 1.5
        if nr <= target:
            return ncx, ncy, nr
    raise PrecisionExhausted(
        f"cluster of radius {r:.3g} not resolvable at scale 2^-{n} "
        "even with exact evaluation at 512 bits")


def _newton_contracts(Q: PolyExact, ball: ComplexBall, prec: int = 128) -> bool:
    """Interval Newton: z0 - Q(z0)/Q'(B) inside B certifies a root in B."""
    z0 = ComplexBall(ball.re, ball.im)
    qz = Q.eval_ball(z0, prec)
    dq = Q.derivative().eval_ball(ball, prec)
    if dq.abs_ival(prec).lo.sign <= 0:
        return False
    quot = _ball_div(qz, dq, prec)
    cand = z0.sub(quot, prec)
    return ball.contains_ball(cand)


def _ball_div(a: ComplexBall, b: ComplexBall, prec: int) -> ComplexBall:
    """a / b for a ball divisor excluding 0."""
    b_lo = b.abs_ival(prec).lo
    if b_lo.sign <= 0:
        raise ZeroDivisionError("divisor ball contains 0")
    # 1/b: center conj(c)/|c|^2, radius <= rad / (|c| (|c| - rad))
    c2 = b.re.square() + b.im.square()
    c2_iv = RIval.point(c2)
    inv_re = RIval.point(b.re).div(c2_iv, prec)
    inv_im = RIval.point(-b.im).div(c2_iv, prec)
    babs = b.abs_ival(prec)
    denom = babs.lo * b_lo
    rad_iv = RIval.point(b.rad).div(RIval.point(denom), prec)
    inv = ComplexBall(inv_re.mid(), inv_im.mid(),
                      (rad_iv.hi + inv_re.width() + inv_im.width()).round_up(prec))
    return a.mul(inv, prec)


def _winding_number(Q: PolyExact, cx: float, cy: float, rho: float,
                    max_arcs: int = 512) -> Optional[int]:
    """Certified winding number of Q over the circle |z - c| = rho, or None
    if certification fails (image meets 0 at the working subdivision)."""
    arcs = 32
    while arcs <= max_arcs:
        ok = True
        total = 0.0
        prev_arg = None
        for k in range(arcs + 1):
            ang = 2 * math.pi * (k % arcs) / arcs
            px = cx + rho * math.cos(ang)
            py = cy + rho * math.sin(ang)
            # ball covering the whole forward arc to the next sample
            pt = ComplexBall(Dyadic.from_float(px), Dyadic.from_float(py),
                             Dyadic.from_float(rho * 7.0 / arcs))
            img = Q.eval_ball(pt, 128)
            a_lo = img.abs_ival(128).lo
            # each arc's image must miss 0 with margin: then its true
            # argument variation stays below 2*asin(1/2) and the principal
            # branch of the measured difference is the correct one.  The
            # measured differences telescope, so the total is exactly
            # 2 pi * winding up to float noise.
            if a_lo.sign <= 0 or float(img.rad) / float(a_lo) >= 0.5:
                ok = False
                break
            th = math.atan2(float(img.im), float(img.re))
            if prev_arg is not None:
                d = th - prev_arg
                while d > math.pi:
                    d -= 2 * math.pi
                while d < -math.pi:
                    d += 2 * math.pi
                total += d
            prev_arg = th
        if ok:
            w = total / (2 * math.pi)
            wi = round(w)
            if abs(w - wi) < 0.01:
                return wi
        arcs *= 2
    return None


# -- periodic orbits ------------------------------------------------------------


@dataclass
class OrbitRecord:
    period: int
    points: List[ComplexBall]
    multiplier: ComplexBall
    kind: str

    def multiplier_abs(self, prec: int = 96) -> RIval:
        return self.multiplier.abs_ival(prec)


def classify_multiplier(mult: ComplexBall, prec: int = 96) -> str:
    a = mult.abs_ival(prec)
    if a.hi.is_zero():
        return "super-attracting"
    if a.hi < 1:
        return "attracting"
    if a.lo > 1:
        return "repelling"
    return "indifferent-unresolved"


def periodic_orbits(f: PolyExact, max_period: int, region: ComplexBall,
                    n: int, prec: int = 128) -> List[OrbitRecord]:
    """All periodic orbits of period <= max_period inside the region,
    localized to 2^-n, grouped into cycles, with multiplier enclosures by
    the chain rule.  Orbits are reported at their minimal period.
    Document: for a quadratic map deg(f^j) = 2^j, so coefficient size and
    subdivision cost grow with 2^max_period."""
    records: List[OrbitRecord] = []
    seen: List[ComplexBall] = []
    fprime = f.derivative()
    for j in range(1, max_period + 1):
        pj = f.iterate(j, prec)
        roots = locate_roots(pj.minus_z(prec), region, n)
        for root in roots:
            if any(root.intersects(s) for s in seen):
                continue
            orbit = _trace_orbit(f, root, roots, j, prec)
            if orbit is None:
                raise PrecisionExhausted(
                    f"orbit grouping ambiguous at period {j}; raise precision")
            mult = ComplexBall(Dyadic(1), Dyadic(0))
            for pt in orbit:
                mult = mult.mul(fprime.eval_ball(pt, prec), prec)
            kind = classify_multiplier(mult, prec)
            records.append(OrbitRecord(j, orbit, mult, kind))
            seen.extend(orbit)
    return records


def _trace_orbit(f: PolyExact, start: ComplexBall, roots: List[ComplexBall],
                 period: int, prec: int) -> Optional[List[ComplexBall]]:
    orbit = [start]
    cur = start
    for _ in range(period - 1):
        img = f.eval_ball(cur, prec)
        matches = [r for r in roots if img.intersects(r)]
        if len(matches) != 1:
            return None
        cur = matches[0]
        orbit.append(cur)
    img = f.eval_ball(cur, prec)
    if not img.intersects(start):
        return None
    return orbit


def separate_nonrepelling(f: PolyExact, cert, k: int) -> List[OrbitRecord]:
    """Refine each certified non-repelling orbit to 2^-k inside its
    separating balls.  ``cert`` is a Certificate (dynamics module); raises
    CertificateInconsistent when a declared separating ball holds no root."""
    out = []
    for entry in cert.nonrepelling:
        period = entry.period
        pj = f.iterate(period).minus_z()
        pts = []
        for ball in entry.separating_balls:
            roots = locate_roots(pj, ball, k)
            roots = [r for r in roots if ball.intersects(r)]
            if not roots:
                raise CertificateInconsistent(
                    f"no period-{period} point inside separating ball {ball}")
            pts.append(roots[0])
        fprime = f.derivative()
        mult = ComplexBall(Dyadic(1), Dyadic(0))
        for pt in pts:
            mult = mult.mul(fprime.eval_ball(pt, 128), 128)
        kind = entry.kind if entry.kind else classify_multiplier(mult)
        out.append(OrbitRecord(period, pts, mult, kind))
    return out
