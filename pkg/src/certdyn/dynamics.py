"""Executable semi-deciders for filled-Julia membership, escape bounds,
certified preimage pullbacks, Leau-Fatou petal construction, and the
non-uniform certificate data they consume.

Every machine is a resumable, step-budgeted computation (``SemiDecider``)
with a one-sided halting contract: it only halts when its halting
condition provably holds in ball arithmetic.  Racing the machines in
parallel is realized as deterministic round-robin stepping; ties break
by the fixed machine order (ext, jul, attr, par, sieg).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import gmpy2

from . import kern
from .balls import BallUnion, ComplexBall, _round_ball
from .dyadic import Dyadic, sqrt_up, two_pow
from .ival import RIval
from .errors import (BudgetExhausted, CertificateInconsistent,
                     PrecisionExhausted)
from .roots import PolyExact, locate_roots, periodic_orbits, taylor_shift


# -- certificate --------------------------------------------------------------


@dataclass
class NonRepellingEntry:
    period: int
    kind: str  # attracting | super-attracting | parabolic | siegel | cremer
    separating_balls: List[ComplexBall]
    parabolic_pq: Optional[Tuple[int, int]] = None  # (p, q), gcd 1


@dataclass
class AttractingTrap:
    period: int
    balls: BallUnion


@dataclass
class SiegelCompanion:
    period: int
    ball: ComplexBall


@dataclass
class Certificate:
    """The finite non-uniform data required to compute a filled Julia set:
    non-repelling orbit types with separating balls, strict forward-trap
    unions for attracting orbits, parabolic (p, q) data, and a repelling
    companion point in the Siegel component."""
    nonrepelling: List[NonRepellingEntry] = field(default_factory=list)
    attracting_traps: List[AttractingTrap] = field(default_factory=list)
    siegel_companion: Optional[SiegelCompanion] = None

    @classmethod
    def empty(cls) -> "Certificate":
        return cls()

    def to_json_obj(self) -> dict:
        def ball_obj(b: ComplexBall) -> dict:
            return BallUnion([b]).to_json_obj()["balls"][0]

        out = {
            "nonrepelling": [
                {
                    "period": e.period,
                    "kind": e.kind,
                    "separating_balls": [ball_obj(b) for b in e.separating_balls],
                    **({"parabolic": {"p": e.parabolic_pq[0], "q": e.parabolic_pq[1]}}
                       if e.parabolic_pq else {}),
                }
                for e in self.nonrepelling
            ],
            "attracting_traps": [
                {"period": t.period, "balls": t.balls.to_json_obj()["balls"]}
                for t in self.attracting_traps
            ],
        }
        if self.siegel_companion:
            out["siegel_companion"] = {
                "period": self.siegel_companion.period,
                "ball": ball_obj(self.siegel_companion.ball),
            }
        return out

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Certificate":
        def ball_from(o: dict) -> ComplexBall:
            return BallUnion.from_json_obj({"balls": [o]}).balls[0]

        nonrep = []
        for e in obj.get("nonrepelling", ()):
            pq = None
            if "parabolic" in e:
                pq = (int(e["parabolic"]["p"]), int(e["parabolic"]["q"]))
            nonrep.append(NonRepellingEntry(
                int(e["period"]), e["kind"],
                [ball_from(b) for b in e["separating_balls"]], pq))
        traps = [AttractingTrap(int(t["period"]),
                                BallUnion.from_json_obj({"balls": t["balls"]}))
                 for t in obj.get("attracting_traps", ())]
        comp = None
        if obj.get("siegel_companion"):
            sc = obj["siegel_companion"]
            comp = SiegelCompanion(int(sc["period"]), ball_from(sc["ball"]))
        return cls(nonrep, traps, comp)

    def dumps(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"), sort_keys=True)

    @classmethod
    def loads(cls, s: str) -> "Certificate":
        return cls.from_json_obj(json.loads(s))


def check_certificate(f: PolyExact, cert: Certificate, prec: int = 128) -> List[dict]:
    """Validate each certificate clause by ball arithmetic; returns one
    report dict per clause with pass/fail and a reason."""
    reports = []
    for t in cert.attracting_traps:
        ok, why = _check_trap(f, t, prec)
        reports.append({"clause": "attracting_trap", "period": t.period,
                        "pass": ok, "detail": why})
    for e in cert.nonrepelling:
        ok, why = _check_nonrepelling(f, e, prec)
        reports.append({"clause": "nonrepelling", "period": e.period,
                        "kind": e.kind, "pass": ok, "detail": why})
    if cert.siegel_companion:
        sc = cert.siegel_companion
        try:
            roots = locate_roots(f.iterate(sc.period, prec).minus_z(prec),
                                 sc.ball, 10)
            inside = [r for r in roots if sc.ball.intersects(r)]
            ok = bool(inside)
            why = f"{len(inside)} periodic point(s) in the companion ball"
        except PrecisionExhausted as exc:
            ok, why = False, str(exc)
        reports.append({"clause": "siegel_companion", "period": sc.period,
                        "pass": ok, "detail": why})
    return reports


def _check_trap(f: PolyExact, trap: AttractingTrap, prec: int) -> Tuple[bool, str]:
    it = f.iterate(trap.period, prec)
    for b in trap.balls:
        img = it.eval_ball(b, prec)
        if not any(img.strictly_inside(t) for t in trap.balls):
            return False, (f"image of {b} not strictly inside the trap "
                           f"(witness ball {img})")
    return True, "f^k(D) strictly inside D for every trap ball"


def _check_nonrepelling(f: PolyExact, e: NonRepellingEntry, prec: int
                        ) -> Tuple[bool, str]:
    try:
        pj = f.iterate(e.period, prec).minus_z(prec)
        found = 0
        for ball in e.separating_balls:
            roots = locate_roots(pj, ball, 8)
            if not any(ball.intersects(r) for r in roots):
                return False, f"no period-{e.period} point in {ball}"
            found += 1
        if e.kind == "parabolic":
            if not e.parabolic_pq:
                return False, "parabolic entry lacks (p, q)"
            p, q = e.parabolic_pq
            if math.gcd(p, q) != 1:
                return False, f"gcd(p,q) != 1 for ({p},{q})"
            # multiplier enclosure must contain e^{2 pi i p/q}
            roots = locate_roots(pj, e.separating_balls[0], 12)
            roots = [r for r in roots if e.separating_balls[0].intersects(r)]
            mult = _orbit_multiplier(f, roots[0], e.period, prec)
            if not _contains_root_of_unity(mult, p, q, prec):
                return False, f"multiplier {mult} excludes e^(2 pi i {p}/{q})"
        return True, f"{found} separating ball(s) verified"
    except (PrecisionExhausted, CertificateInconsistent) as exc:
        return False, str(exc)


def _orbit_multiplier(f: PolyExact, pt: ComplexBall, period: int, prec: int
                      ) -> ComplexBall:
    fp = f.derivative()
    mult = ComplexBall(Dyadic(1), Dyadic(0))
    cur = pt
    for _ in range(period):
        mult = mult.mul(fp.eval_ball(cur, prec), prec)
        cur = f.eval_ball(cur, prec)
    return mult


def _contains_root_of_unity(mult: ComplexBall, p: int, q: int, prec: int) -> bool:
    from .ival import pi_ival
    ang = pi_ival(prec).scale2(1) * RIval.from_fraction(
        __import__("fractions").Fraction(p, q), prec)
    cr = ang.cos(prec)
    ci = ang.sin(prec)
    # the target lies in a tiny box; require it to meet the multiplier ball
    dx = RIval.point(mult.re) - cr
    dy = RIval.point(mult.im) - ci
    d2 = dx * dx + dy * dy
    return d2.lo <= mult.rad.square()


# -- escape radius -------------------------------------------------------------


def escape_radius(f: PolyExact, prec: int = 64) -> Dyadic:
    """R with |z| >= R  =>  |f(z)| >= 2 |z| (so orbits leaving B(0,R)
    escape): R = max(1, (2 + sum |a_i|, i<d) / |a_d|), certified from the
    coefficient balls."""
    if f.degree < 2:
        raise ValueError("escape radius needs degree >= 2")
    s = RIval.point(2)
    for c in f.coeffs[:-1]:
        s = s + c.abs_ival(prec)
    lead_lo = f.coeffs[-1].abs_ival(prec).lo
    r = s.div(RIval.point(lead_lo), prec).hi
    return max(Dyadic(1), r.round_up(prec))


def beta_bound_real(c: Dyadic, prec: int = 96) -> RIval:
    """For real c <= -2: the landing fixed point beta_c = sqrt(1/4-c)+1/2;
    the Julia set lies in the closed ball of radius beta_c."""
    quarter_minus_c = RIval.point(Dyadic(1, -2)) - RIval.point(c)
    return quarter_minus_c.sqrt(prec) + RIval.point(Dyadic(1, -1))


# -- grid rasters ---------------------------------------------------------------


@dataclass
class Grid:
    """Square cell raster: cell (i,j) covers
    [x0 + i*h, x0 + (i+1)*h] x [y0 + j*h, y0 + (j+1)*h], h = 2^-res."""
    x0: Dyadic
    y0: Dyadic
    res: int
    nx: int
    ny: int

    @property
    def h(self) -> Dyadic:
        return two_pow(-self.res)

    @classmethod
    def square(cls, half_extent: Dyadic, res: int) -> "Grid":
        n = half_extent.scale2(res)
        cells = int(math.ceil(float(n))) + 1
        side = 2 * cells
        origin = -Dyadic(cells, -res)
        return cls(origin, origin, res, side, side)

    def centers(self) -> Tuple[np.ndarray, np.ndarray]:
        h = float(self.h)
        xs = float(self.x0) + (np.arange(self.nx) + 0.5) * h
        ys = float(self.y0) + (np.arange(self.ny) + 0.5) * h
        return xs, ys

    def cell_center(self, i: int, j: int) -> Tuple[Dyadic, Dyadic]:
        h = self.h
        return (self.x0 + Dyadic(2 * i + 1, -self.res - 1),
                self.y0 + Dyadic(2 * j + 1, -self.res - 1))

    def locate(self, x: Dyadic, y: Dyadic) -> Tuple[int, int]:
        return ((x - self.x0).floor2(self.res), (y - self.y0).floor2(self.res))

    def rasterize_outer(self, s: BallUnion) -> np.ndarray:
        """Cells whose closed square meets some ball (conservative outer)."""
        mask = np.zeros((self.nx, self.ny), dtype=bool)
        h = float(self.h)
        x0, y0 = float(self.x0), float(self.y0)
        for b in s.balls:
            cx, cy, r = float(b.re), float(b.im), float(b.rad) * (1 + 1e-12) + 1e-300
            i0 = max(0, int(math.floor((cx - r - x0) / h)) - 1)
            i1 = min(self.nx - 1, int(math.floor((cx + r - x0) / h)) + 1)
            j0 = max(0, int(math.floor((cy - r - y0) / h)) - 1)
            j1 = min(self.ny - 1, int(math.floor((cy + r - y0) / h)) + 1)
            if i0 > i1 or j0 > j1:
                continue
            ii = np.arange(i0, i1 + 1)
            jj = np.arange(j0, j1 + 1)
            gx = x0 + ii * h
            gy = y0 + jj * h
            # clamp of the center into each cell (outer: pad by 1 ulp scale)
            px = np.clip(cx, gx[:, None], gx[:, None] + h)
            py = np.clip(cy, gy[None, :], gy[None, :] + h)
            d2 = (px - cx) ** 2 + (py - cy) ** 2
            mask[i0:i1 + 1, j0:j1 + 1] |= d2 <= (r * (1 + 1e-12)) ** 2
        return mask

    def rasterize_inner(self, s: BallUnion) -> np.ndarray:
        """Cells certifiably contained in a single ball (conservative)."""
        mask = np.zeros((self.nx, self.ny), dtype=bool)
        h = float(self.h)
        x0, y0 = float(self.x0), float(self.y0)
        half_diag = h * 0.7071067811865477
        for b in s.balls:
            cx, cy, r = float(b.re), float(b.im), float(b.rad)
            rr = r * (1 - 1e-12) - half_diag * (1 + 1e-12)
            if rr <= 0:
                continue
            i0 = max(0, int(math.floor((cx - rr - x0) / h)))
            i1 = min(self.nx - 1, int(math.floor((cx + rr - x0) / h)))
            j0 = max(0, int(math.floor((cy - rr - y0) / h)))
            j1 = min(self.ny - 1, int(math.floor((cy + rr - y0) / h)))
            if i0 > i1 or j0 > j1:
                continue
            ii = np.arange(i0, i1 + 1)
            jj = np.arange(j0, j1 + 1)
            mx = x0 + ii * h + h / 2
            my = y0 + jj * h + h / 2
            d2 = (mx[:, None] - cx) ** 2 + (my[None, :] - cy) ** 2
            mask[i0:i1 + 1, j0:j1 + 1] |= d2 <= rr * rr
        return mask

    def cells_to_union(self, mask: np.ndarray) -> BallUnion:
        """Cover the marked cells by balls (center = cell center, radius =
        half-diagonal, rounded up)."""
        rad = (self.h * Dyadic(1449, -11)).round_up(64)  # h * 0.7071...
        idx = np.argwhere(mask)
        balls = []
        for i, j in idx:
            cxx, cyy = self.cell_center(int(i), int(j))
            balls.append(ComplexBall(cxx, cyy, rad))
        return BallUnion(balls)

    def mask_image_step(self, mask: np.ndarray, f: PolyExact, mode: str
                        ) -> np.ndarray:
        """One pullback step: keep cell iff its image ball meets (outer) /
        certifiably lies inside (inner) the cells of ``mask``."""
        keep_idx = np.argwhere(np.ones((self.nx, self.ny), dtype=bool))
        h = float(self.h)
        xs = float(self.x0) + (keep_idx[:, 0] + 0.5) * h
        ys = float(self.y0) + (keep_idx[:, 1] + 0.5) * h
        rad = np.full(xs.shape, h * 0.7071067811865477 * (1 + 2e-16))
        cr, ci, crad = f.float_view()
        wr, wi, wrad = kern.poly_eval(cr, ci, crad, xs, ys, rad)
        return self._image_test(mask, keep_idx, wr, wi, wrad, mode)

    def _image_test(self, mask, keep_idx, wr, wi, wrad, mode):
        h = float(self.h)
        x0, y0 = float(self.x0), float(self.y0)
        if mode == "outer":
            pad = wrad * (1 + 1e-12) + 1e-300
            i0 = np.floor((wr - pad - x0) / h).astype(np.int64)
            i1 = np.floor((wr + pad - x0) / h).astype(np.int64)
            j0 = np.floor((wi - pad - y0) / h).astype(np.int64)
            j1 = np.floor((wi + pad - y0) / h).astype(np.int64)
            hit = kern.rect_any(mask, i0, i1, j0, j1)
        else:
            pad = wrad * (1 + 1e-12) + 1e-300
            i0 = np.floor((wr - pad - x0) / h).astype(np.int64)
            i1 = np.floor((wr + pad - x0) / h).astype(np.int64)
            j0 = np.floor((wi - pad - y0) / h).astype(np.int64)
            j1 = np.floor((wi + pad - y0) / h).astype(np.int64)
            hit = kern.rect_all(mask, i0, i1, j0, j1)
        out = np.zeros_like(mask)
        out[keep_idx[:, 0], keep_idx[:, 1]] = hit
        return out


def mask_hausdorff_gap_ub(grid: Grid, outer: np.ndarray, inner: np.ndarray
                          ) -> float:
    """Upper bound (in absolute units) on sup over outer cells of the
    distance to the inner cell set; inf when inner is empty."""
    if not inner.any():
        return math.inf
    if not outer.any():
        return 0.0
    from scipy.ndimage import distance_transform_edt
    # distance (in cells) from each cell center to the nearest inner cell
    d = distance_transform_edt(~inner)
    worst = float(d[outer].max())
    h = float(grid.h)
    return (worst + 1.4143) * h


# -- pullback -------------------------------------------------------------------


def pullback(f: PolyExact, s: BallUnion, k: int, m: int,
             budget_cells: int = 40_000_000) -> BallUnion:
    """Two-sided raster computation of a 2^-m approximation of f^{-k}(S):
    outer cells keep when the forward k-image meets S; a matched inner
    witness raster certifies the Hausdorff bound.  Raises BudgetExhausted
    when the certified gap cannot reach 2^-m within the cell budget."""
    if s.is_empty():
        return BallUnion()
    R = escape_radius(f)
    extent = max(s.bounding_radius() + Dyadic(1), R + Dyadic(1))
    res = m + 2
    while True:
        grid = Grid.square(extent, res)
        if grid.nx * grid.ny * (k + 1) > budget_cells:
            raise BudgetExhausted(
                f"pullback needs more than {budget_cells} cell evaluations")
        outer = grid.rasterize_outer(s)
        inner = grid.rasterize_inner(s)
        for _ in range(k):
            outer = grid.mask_image_step(outer, f, "outer")
            inner = grid.mask_image_step(inner, f, "inner")
        gap = mask_hausdorff_gap_ub(grid, outer, inner)
        if gap <= float(two_pow(-m)) * 0.9:
            return grid.cells_to_union(outer)
        res += 1


# -- inverse-orbit Julia samples -------------------------------------------------


def ball_sqrt(b: ComplexBall, prec: int = 96) -> Optional[ComplexBall]:
    """Principal square root of a ball excluding 0 (None when 0 cannot be
    excluded).  |sqrt z - sqrt w| <= |z-w| / (2 sqrt(min |.|))."""
    alo = b.abs_ival(prec).lo
    if alo.sign <= 0:
        return None
    with gmpy2.context(precision=prec, real_round=gmpy2.RoundToNearest,
                       imag_round=gmpy2.RoundToNearest):
        z = gmpy2.mpc(_mpfr_exact(b.re, prec), _mpfr_exact(b.im, prec))
        w = gmpy2.sqrt(z)
    wre = _dy_from_mpfr(w.real)
    wim = _dy_from_mpfr(w.imag)
    # rounding of the two components: 1 ulp each; derivative bound for the
    # ball radius
    denom = sqrt_up(alo, prec)  # sqrt(|center|-rad) <= this is an UPPER bound
    # need a LOWER bound on sqrt(min|z|) over the ball:
    from .dyadic import sqrt_down
    denom_lo = sqrt_down(alo, prec)
    if denom_lo.sign <= 0:
        return None
    rad_iv = RIval.point(b.rad).div(RIval.point(denom_lo).scale2(1), prec)
    ulp = (abs(wre) + abs(wim) + Dyadic(1, -prec)).round_up(16).scale2(-prec + 2)
    return ComplexBall(wre, wim, (rad_iv.hi + ulp).round_up(prec))


def _mpfr_exact(d: Dyadic, prec: int):
    with gmpy2.context(precision=max(d.bit_size() + 2, prec)):
        return gmpy2.mul_2exp(gmpy2.mpfr(d.man), d.exp)


def _dy_from_mpfr(x) -> Dyadic:
    m, e = x.as_mantissa_exp()
    return Dyadic(int(m), int(e))


def julia_samples_quadratic(c: ComplexBall, depth: int, n: int,
                            prec: int = 96, cap: int = 300_000
                            ) -> List[ComplexBall]:
    """Certified points near J(z^2+c): the inverse-orbit tree of the
    repelling landing fixed point beta, plus periodic repelling orbits are
    added by callers.  Every returned ball has radius <= 2^-(n+3) and its
    center lies within that radius of J."""
    f = PolyExact([c, ComplexBall(Dyadic(0), Dyadic(0)),
                   ComplexBall(Dyadic(1), Dyadic(0))])
    # beta = (1 + sqrt(1-4c))/2, repelling for c != 1/4
    one = ComplexBall(Dyadic(1), Dyadic(0))
    rad = ball_sqrt(one.sub(c.scale(Dyadic(4)), prec), prec)
    if rad is None:
        raise PrecisionExhausted("cannot enclose sqrt(1-4c)")
    beta = one.add(rad, prec).scale(Dyadic(1, -1), prec)
    lam = beta.scale(Dyadic(2))
    if lam.abs_ival(prec).lo <= 1:
        raise PrecisionExhausted("landing fixed point not certified repelling")
    tol = two_pow(-(n + 3))
    out: List[ComplexBall] = []
    frontier = [beta]
    for _ in range(depth):
        nxt: List[ComplexBall] = []
        for z in frontier:
            w = z.sub(c, prec)
            root = ball_sqrt(w, prec)
            if root is None:
                continue
            for cand in (root, root.neg()):
                if cand.rad <= tol:
                    nxt.append(cand)
        out.extend(nxt)
        frontier = nxt
        if len(out) > cap:
            break
    if beta.rad <= tol:
        out.append(beta)
    return out


# -- petals ---------------------------------------------------------------------


@dataclass
class Petal:
    parabolic_point: ComplexBall
    n_directions: int
    a_coeff: ComplexBall
    r_halfplane: Dyadic
    level: int
    region: BallUnion  # inner approximation of the petal cycle at this level


def build_petal(f: PolyExact, parabolic_ball: ComplexBall, period: int,
                p_over_q: Tuple[int, int], k: int, prec: int = 160
                ) -> List[Petal]:
    """Construct the attracting-petal cycle at a parabolic point.

    Computes the iterate g = f^(period*q) fixing the point, its local
    series z + a w^{n+1} + ..., certifies a right half-plane H_r with
    Re F(w) > Re w + 1/2 in the kappa-coordinate w = c/(z-p)^n with
    c = -1/(n a), and emits inner approximations L_k of the petals with
    L_{k+1} >= L_k and dist_H(L_k, P) -> 0."""
    p_num, q = p_over_q
    g = f.iterate(period * q, prec)
    # refine the parabolic point: prefer an exact root
    gz = g.minus_z(prec)
    roots = locate_roots(gz, parabolic_ball, max(16, k + 6))
    roots = [r for r in roots if parabolic_ball.intersects(r)]
    if not roots:
        raise CertificateInconsistent("no fixed point of f^(m q) in the ball")
    zeta = roots[0]
    S = taylor_shift(g, ComplexBall(zeta.re, zeta.im), prec)
    # local form: S(w) = zeta + lam w + b2 w^2 + ...; lam must enclose 1
    n_dir = None
    for idx in range(2, len(S.coeffs)):
        aiv = S.coeffs[idx].abs_ival(prec)
        if aiv.lo.sign > 0:
            n_dir = idx - 1
            break
        if aiv.hi > two_pow(-8):
            raise PrecisionExhausted(
                f"coefficient {idx} of the local series is ambiguous")
    if n_dir is None:
        raise PrecisionExhausted("no certified nonlinear term at the parabolic point")
    a = S.coeffs[n_dir + 1]
    # c = -1/(n a)
    from .roots import _ball_div
    c_coeff = _ball_div(ComplexBall(Dyadic(-1), Dyadic(0)),
                        a.scale(Dyadic(n_dir)), prec)
    r = _certify_halfplane(S, zeta, n_dir, a, c_coeff, prec)
    petals = _petal_regions(f, zeta, n_dir, c_coeff, r, period, q, k, prec)
    return petals


def _certify_halfplane(S: PolyExact, zeta: ComplexBall, n: int,
                       a: ComplexBall, c_coeff: ComplexBall, prec: int
                       ) -> Dyadic:
    """Smallest tried r = 2^e with a certified |F(w) - w - 1| <= 1/2 on the
    half-plane Re w > r, where F is the map in the kappa-coordinate.

    With u = kappa^{-1}(w), s = |u| = (|c|/|w|)^{1/n} and the local series
    g(zeta+u) = zeta + u (1 + a u^n + eta(u)), |eta| <= s^{n+1} H:
        F(w) = w + 1 - n w eta + w rho,   |rho| <= C_n |v|^2,
        v = -1/(n w) + eta,   |w eta| <= s |c| H.
    Every quantity below is an upper bound computed from the coefficient
    enclosures of the shifted series S."""
    from fractions import Fraction
    abs_c_hi = c_coeff.abs_ival(prec).hi
    half = Dyadic(1, -1)
    for r_exp in range(0, 60):
        r = Dyadic(1, r_exp)
        ratio = RIval.point(abs_c_hi).div(RIval.point(r), prec)
        s_r = ratio.rootn(n, prec).hi            # s bound on the half-plane
        # H = sum_{j >= n+2} |b_j| s_r^(j-n-2)
        H = RIval.point(0)
        pw = RIval.point(1)
        for j in range(n + 2, len(S.coeffs)):
            H = (H + S.coeffs[j].abs_ival(prec) * pw).round(prec)
            pw = (pw * RIval.point(s_r)).round(prec)
        H_hi = H.hi
        weta = ((RIval.point(s_r) * RIval.point(abs_c_hi))
                * RIval.point(H_hi)).hi          # |w eta| bound
        # s_r^{n+1} H: |eta| bound on the region
        s_pow = RIval.point(1)
        for _ in range(n + 1):
            s_pow = (s_pow * RIval.point(s_r)).round(prec)
        eta_hi = (s_pow * RIval.point(H_hi)).hi
        inv_nr = RIval.point(Dyadic(1)).div(
            RIval.point(Dyadic(n) * r), prec).hi
        v0 = inv_nr + eta_hi
        if not v0 < half:
            continue
        # C_n = n(n+1)/2 / (1 - v0)^(n+2)
        one_minus = RIval.point(Dyadic(1) - v0)
        denom = RIval.point(1)
        for _ in range(n + 2):
            denom = (denom * one_minus).round(prec)
        cn = RIval.from_fraction(Fraction(n * (n + 1), 2), prec).div(denom, prec)
        # |w rho| <= C_n (|w| |v|) |v| <= C_n (1/n + |w eta|) v0
        wrho = (cn * (RIval.from_fraction(Fraction(1, n), prec)
                      + RIval.point(weta)) * RIval.point(v0)).hi
        e_hi = Dyadic(n) * weta + wrho
        if e_hi < half:
            return r
    raise PrecisionExhausted("no certified half-plane radius found")


def _petal_regions(f: PolyExact, zeta: ComplexBall, n: int,
                   c_coeff: ComplexBall, r: Dyadic, period: int, q: int,
                   k: int, prec: int) -> List[Petal]:
    """Inner approximations of the petal cycle.

    For n = 1 the petal kappa^{-1}(H_r) is exactly the open disk of radius
    |c|/(2r) centered at zeta + c/(2r); its forward images under f give the
    cycle.  For n >= 2 the petal components are rasterized from the
    certified inequality Re(c/(z-zeta)^n) > r."""
    petals = []
    level_margin = two_pow(-(k + 4))
    if n == 1:
        # kappa^{-1}(H_r) is exactly the open disk of radius |c|/(2r)
        # centered at zeta + c/(2r); shrink by the enclosure slack so the
        # emitted region is a certified subset of the petal.  Forward
        # images are NOT added: an image *enclosure* would overshoot the
        # true petal, and membership tests must stay inside the basin.
        # The base petal is revisited by every orbit each period*q steps.
        inv2r = RIval.point(Dyadic(1)).div(RIval.point(r.scale2(1)), 96)
        ctr = zeta.add(c_coeff.scale(inv2r.hi, 96), 96)
        rad_iv = c_coeff.abs_ival(96) * inv2r
        shrink = (rad_iv.lo - ctr.rad - level_margin)
        if shrink.sign <= 0:
            raise PrecisionExhausted("petal disk collapsed by enclosure slack")
        disk = ComplexBall(ctr.re, ctr.im, shrink)
        region = BallUnion([disk])
        petals.append(Petal(zeta, n, c_coeff, r, k, region))
        return petals
    # n >= 2: raster the sector-like components
    s_max = float(c_coeff.abs_ival(96).hi) ** (1.0 / n) / float(r) ** (1.0 / n)
    res = k + 3
    grid = Grid.square(Dyadic.from_float(s_max * 1.2 + 0.1) + abs(zeta.re) + abs(zeta.im), res)
    mask = np.zeros((grid.nx, grid.ny), dtype=bool)
    h = float(grid.h)
    zx, zy = float(zeta.re), float(zeta.im)
    for i in range(grid.nx):
        for j in range(grid.ny):
            cxx = float(grid.x0) + (i + 0.5) * h
            cyy = float(grid.y0) + (j + 0.5) * h
            cell = ComplexBall(Dyadic.from_float(cxx), Dyadic.from_float(cyy),
                               Dyadic.from_float(h * 0.7072))
            w = cell.sub(zeta, 96)
            if w.abs_ival(96).lo.sign <= 0:
                continue
            pw = w
            for _ in range(n - 1):
                pw = pw.mul(w, 96)
            # Re(c / pw) > r certified
            try:
                from .roots import _ball_div
                quot = _ball_div(c_coeff, pw, 96)
            except ZeroDivisionError:
                continue
            if quot.re - quot.rad > r:
                mask[i, j] = True
    region = grid.cells_to_union(mask)
    petals.append(Petal(zeta, n, c_coeff, r, k, region))
    return petals


# -- semi-deciders ---------------------------------------------------------------


PENDING = "pending"


class SemiDecider:
    """A resumable, step-budgeted computation that may halt with a verdict
    or stay pending forever; once halted the verdict never changes."""

    def __init__(self):
        self.verdict: Optional[int] = None
        self.round = 0

    def step(self) -> Optional[int]:
        if self.verdict is not None:
            return self.verdict
        self.round += 1
        self.verdict = self._run_round(self.round)
        return self.verdict

    def run(self, max_rounds: int) -> Optional[int]:
        for _ in range(max_rounds):
            v = self.step()
            if v is not None:
                return v
        return None

    def _run_round(self, k: int) -> Optional[int]:
        raise NotImplementedError


class DynContext:
    """Shared artifact cache for the machines of one (map, certificate,
    precision) triple: pullback rasters, certified J samples, traps,
    petals."""

    def __init__(self, f: PolyExact, cert: Optional[Certificate], n: int,
                 c_ball: Optional[ComplexBall] = None):
        self.f = f
        self.cert = cert or Certificate.empty()
        self.n = n
        self.R = escape_radius(f)
        self.c_ball = c_ball
        self._pullback: Dict[int, Tuple[Grid, np.ndarray]] = {}
        self._samples: Dict[int, List[ComplexBall]] = {}
        self._petals: Dict[Tuple[int, int], List[Petal]] = {}
        self._big_ball = ComplexBall(Dyadic(0), Dyadic(0), self.R + Dyadic(1))

    # B_k: outer raster of f^{-k}(B) at resolution n+3
    def pullback_mask(self, k: int) -> Tuple[Grid, np.ndarray]:
        if k not in self._pullback:
            if k == 0:
                grid = Grid.square(self.R + Dyadic(2), self.n + 3)
                mask = grid.rasterize_outer(BallUnion([self._big_ball]))
            else:
                grid, prev = self.pullback_mask(k - 1)
                mask = grid.mask_image_step(prev, self.f, "outer")
            self._pullback[k] = (grid, mask)
        return self._pullback[k]

    # C_k: certified J samples (inverse orbit tree to depth k + periodic)
    def j_samples(self, k: int) -> List[ComplexBall]:
        if k not in self._samples:
            pts: List[ComplexBall] = []
            if self.c_ball is not None:
                try:
                    pts = julia_samples_quadratic(self.c_ball, depth=k + 3,
                                                  n=self.n)
                except PrecisionExhausted:
                    pts = []
            try:
                period_cap = min(3 + k // 2, 6)
                recs = periodic_orbits(self.f, period_cap, self._big_ball,
                                       self.n + 3)
                for rec in recs:
                    if rec.kind == "repelling":
                        pts.extend(rec.points)
            except (PrecisionExhausted, Exception):
                pass
            self._samples[k] = pts
        return self._samples[k]

    def siegel_points(self) -> Optional[Tuple[ComplexBall, ComplexBall]]:
        """(center, companion) when the certificate declares a Siegel orbit
        with a companion repelling point; cached."""
        if not hasattr(self, "_siegel_pts"):
            self._siegel_pts = None
            sieg = next((e for e in self.cert.nonrepelling
                         if e.kind == "siegel"), None)
            comp = self.cert.siegel_companion
            if sieg is not None and comp is not None:
                center_roots = locate_roots(
                    self.f.iterate(sieg.period).minus_z(),
                    sieg.separating_balls[0], self.n + 4)
                comp_roots = locate_roots(
                    self.f.iterate(comp.period).minus_z(), comp.ball,
                    self.n + 4)
                if center_roots and comp_roots:
                    self._siegel_pts = (center_roots[0], comp_roots[0])
        return self._siegel_pts

    def petals(self, k: int) -> List[Petal]:
        out = []
        for e in self.cert.nonrepelling:
            if e.kind != "parabolic":
                continue
            key = (e.period, k)
            if key not in self._petals:
                self._petals[key] = build_petal(
                    self.f, e.separating_balls[0], e.period, e.parabolic_pq, k)
            out.extend(self._petals[key])
        return out


def _disk_hits_mask(grid: Grid, mask: np.ndarray, cx: float, cy: float,
                    r: float) -> bool:
    h = float(grid.h)
    x0, y0 = float(grid.x0), float(grid.y0)
    i0 = max(0, int(math.floor((cx - r - x0) / h)) - 1)
    i1 = min(grid.nx - 1, int(math.floor((cx + r - x0) / h)) + 1)
    j0 = max(0, int(math.floor((cy - r - y0) / h)) - 1)
    j1 = min(grid.ny - 1, int(math.floor((cy + r - y0) / h)) + 1)
    if i0 > i1 or j0 > j1:
        return False
    sub = mask[i0:i1 + 1, j0:j1 + 1]
    if not sub.any():
        return False
    ii, jj = np.nonzero(sub)
    gx = x0 + (ii + i0) * h
    gy = y0 + (jj + j0) * h
    px = np.clip(cx, gx, gx + h)
    py = np.clip(cy, gy, gy + h)
    d2 = (px - cx) ** 2 + (py - cy) ** 2
    return bool((d2 <= r * r * (1 - 1e-12)).any())


class MExt(SemiDecider):
    """Halts 0 when B_k misses B(d, 7/6 * 2^-n) (then dist(d, K) is large);
    never halts when dist(d, K) <= 2^-n."""

    def __init__(self, ctx: DynContext, d: Tuple[Dyadic, Dyadic]):
        super().__init__()
        self.ctx = ctx
        self.d = d

    def _run_round(self, k):
        grid, mask = self.ctx.pullback_mask(k)
        if not _disk_hits_mask(grid, mask, float(self.d[0]), float(self.d[1]),
                               (7 / 6) * 2.0 ** -self.ctx.n):
            return 0
        return None


class MJul(SemiDecider):
    """Halts 1 when d is within 11/6 * 2^-n of the certified J samples."""

    def __init__(self, ctx: DynContext, d: Tuple[Dyadic, Dyadic]):
        super().__init__()
        self.ctx = ctx
        self.d = d

    def _run_round(self, k):
        pts = self.ctx.j_samples(k)
        if not pts:
            return None
        thr = (11 / 6) * 2.0 ** -self.ctx.n * (1 - 1e-12)
        dx = float(self.d[0])
        dy = float(self.d[1])
        for p in pts:
            if math.hypot(float(p.re) - dx, float(p.im) - dy) <= thr:
                return 1
        return None


class MAttr(SemiDecider):
    """Halts 1 iff d is in the basin of a certified attracting orbit."""

    def __init__(self, ctx: DynContext, d: Tuple[Dyadic, Dyadic]):
        super().__init__()
        self.ctx = ctx
        self.d = d
        self.prec = 64
        self._restart()

    def _restart(self):
        self.z = ComplexBall(self.d[0], self.d[1])
        self.steps_done = 0

    def _run_round(self, k):
        traps = self.ctx.cert.attracting_traps
        if not traps:
            return None
        m = 1
        for t in traps:
            m = m * t.period // math.gcd(m, t.period)
        goal = m * (1 << min(k, 24))
        while self.steps_done < goal:
            self.z = self.ctx.f.eval_ball(self.z, self.prec)
            self.steps_done += 1
            if self.z.rad > two_pow(-8):
                self.prec *= 2
                self._restart()
                return None
            if self.steps_done % m == 0:
                margin = self._trap_margin()
                for t in traps:
                    for b in t.balls:
                        slack = b.rad - self.z.rad - margin
                        if slack.sign > 0 and \
                                self.z.center_dist_sq(b) < slack.square():
                            return 1
        return None

    def _trap_margin(self) -> Dyadic:
        return two_pow(-(self.ctx.n + 6))


class MPar(SemiDecider):
    """Halts 1 iff d is in the basin of a certified parabolic orbit."""

    def __init__(self, ctx: DynContext, d: Tuple[Dyadic, Dyadic]):
        super().__init__()
        self.ctx = ctx
        self.d = d
        self.prec = 96

    def _run_round(self, k):
        if not any(e.kind == "parabolic" for e in self.ctx.cert.nonrepelling):
            return None
        petals = self.ctx.petals(k)
        z = ComplexBall(self.d[0], self.d[1])
        for _ in range(1 << min(k, 22)):
            if z.rad > two_pow(-(k + 2)):
                self.prec *= 2
                return None
            for petal in petals:
                margin = two_pow(-k)
                for b in petal.region.balls:
                    slack = b.rad - z.rad - margin
                    if slack.sign > 0 and z.center_dist_sq(b) < slack.square():
                        return 1
            z = self.ctx.f.eval_ball(z, self.prec)
        return None


class MSieg(SemiDecider):
    """Halts 1 when the forward images of a ball around d certifiably
    separate the Siegel center from its companion repelling point (or
    cover one of them); never halts when dist(d, K) >= 2 * 2^-n."""

    def __init__(self, ctx: DynContext, d: Tuple[Dyadic, Dyadic],
                 center: ComplexBall, companion: ComplexBall):
        super().__init__()
        self.ctx = ctx
        self.d = d
        self.center = center
        self.companion = companion
        n = ctx.n
        # seed radius strictly between 4/3 and 5/3 of 2^-n
        self.s0 = Dyadic(3, -1) * two_pow(-n)  # 1.5 * 2^-n
        self.prec = 96
        self._restart()

    def _restart(self):
        self.z = ComplexBall(self.d[0], self.d[1])
        self.inner: List[Tuple[float, float, float]] = []
        s = float(self.s0)
        self.s = s
        self._record()

    def _record(self):
        zr, zi = float(self.z.re), float(self.z.im)
        s_eff = self.s - float(self.z.rad)
        if s_eff > 0 and math.hypot(zr, zi) < float(self.ctx.R) + 1:
            self.inner.append((zr, zi, s_eff))

    def _run_round(self, k):
        if self.ctx.f.degree != 2:
            return None  # inner-image propagation implemented for quadratics
        fp = self.ctx.f.derivative()
        steps = 1 << min(k, 12)
        for _ in range(steps):
            # quadratic inner image: f(B(x,s)) contains B(f(x), s(|f'(x)|-s))
            # since |f(z)-f(x)| = |z-x| |z+x+a1| >= s (|f'(x)| - s) on the
            # boundary circle (winding argument)
            d_lo = fp.eval_ball(self.z, 64).abs_ival(64).lo
            s_new = self.s * (float(d_lo) - self.s) * (1 - 1e-12)
            self.z = self.ctx.f.eval_ball(self.z, self.prec)
            if s_new <= 0 or self.z.rad > two_pow(-10):
                return None  # chain collapsed; stay silent
            self.s = s_new
            self._record()
        if k % 2 == 0 or k > 6:
            return self._separation_test()
        return None

    def _separation_test(self) -> Optional[int]:
        if len(self.inner) < 3:
            return None
        from scipy.ndimage import label
        grid = Grid.square(self.ctx.R + Dyadic(1), self.ctx.n + 3)
        h = float(grid.h)
        x0, y0 = float(grid.x0), float(grid.y0)
        mask = np.zeros((grid.nx, grid.ny), dtype=bool)
        for (zr, zi, s) in self.inner:
            rr = s * (1 - 1e-9) - h * 0.7072
            if rr <= 0:
                continue
            i0 = max(0, int((zr - rr - x0) / h))
            i1 = min(grid.nx - 1, int((zr + rr - x0) / h))
            j0 = max(0, int((zi - rr - y0) / h))
            j1 = min(grid.ny - 1, int((zi + rr - y0) / h))
            if i0 > i1 or j0 > j1:
                continue
            ii = np.arange(i0, i1 + 1)
            jj = np.arange(j0, j1 + 1)
            mx = x0 + (ii + 0.5) * h
            my = y0 + (jj + 0.5) * h
            d2 = (mx[:, None] - zr) ** 2 + (my[None, :] - zi) ** 2
            mask[i0:i1 + 1, j0:j1 + 1] |= d2 <= rr * rr
        # covering either marked point also halts
        if _ball_covered(grid, mask, self.center) or \
                _ball_covered(grid, mask, self.companion):
            return 1
        labels, _ = label(~mask)
        ci = grid.locate(self.center.re, self.center.im)
        yi = grid.locate(self.companion.re, self.companion.im)
        if not (0 <= ci[0] < grid.nx and 0 <= ci[1] < grid.ny):
            return None
        if not (0 <= yi[0] < grid.nx and 0 <= yi[1] < grid.ny):
            return None
        lc = labels[ci[0], ci[1]]
        ly = labels[yi[0], yi[1]]
        if lc != ly and lc != 0 and ly != 0:
            return 1
        return None


def _ball_covered(grid: Grid, mask: np.ndarray, b: ComplexBall) -> bool:
    """Every cell meeting the ball is marked (so the ball lies in the
    marked union)."""
    h = float(grid.h)
    x0, y0 = float(grid.x0), float(grid.y0)
    cx, cy, r = float(b.re), float(b.im), float(b.rad) * (1 + 1e-12) + h * 0.01
    i0 = int(math.floor((cx - r - x0) / h))
    i1 = int(math.floor((cx + r - x0) / h))
    j0 = int(math.floor((cy - r - y0) / h))
    j1 = int(math.floor((cy + r - y0) / h))
    if i0 < 0 or j0 < 0 or i1 >= grid.nx or j1 >= grid.ny:
        return False
    return bool(mask[i0:i1 + 1, j0:j1 + 1].all())


def make_machines(ctx: DynContext, d: Tuple[Dyadic, Dyadic]) -> List[SemiDecider]:
    """The machine battery for one query point, in the deterministic race
    order (ext, jul, attr, par, sieg)."""
    out: List[SemiDecider] = [MExt(ctx, d), MJul(ctx, d)]
    out.append(MAttr(ctx, d))
    out.append(MPar(ctx, d))
    pts = ctx.siegel_points()
    if pts is not None:
        out.append(MSieg(ctx, d, pts[0], pts[1]))
    return out


def race(machines: Sequence[SemiDecider], max_rounds: int) -> Tuple[Optional[int], Optional[int]]:
    """Deterministic round-robin race; returns (verdict, machine index) of
    the first halted machine, ties broken by list order."""
    for _ in range(max_rounds):
        for idx, m in enumerate(machines):
            v = m.step()
            if v is not None:
                return v, idx
    return None, None
