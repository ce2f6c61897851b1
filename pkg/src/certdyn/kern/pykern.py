"""Pure-python/numpy fallback kernels.

Float64 ball arithmetic: a ball is (re, im, rad) with float64 fields.
Every float64 is an exact dyadic, so these are honest ball operations at
53-bit working precision; rounding errors of the center computation are
absorbed into the radius with a safety factor > 4 over the worst-case
IEEE bound (documented per formula).  Radius inf means "enclosure lost".

The Cython twin (certdyn._ckern) uses the same formulas in the same
order, so outputs are bit-identical between the two implementations.
"""

import numpy as np

CENTER_EPS = 2e-15   # > 4 * 2^-53 * margin: center rounding absorbed
SQRT_INFL = 1.0 + 2e-15
RAD_INFL = 1.0 + 5e-15
TINY = 1e-290


def quad_step(zr, zi, rad, cr, ci, crad):
    """One step z -> z^2 + c on arrays of balls; c a single ball."""
    s = zr * zr + zi * zi
    wr = (zr * zr - zi * zi) + cr
    wi = 2.0 * (zr * zi) + ci
    azu = np.sqrt(s) * SQRT_INFL
    cerr = (s + s + abs(cr) + abs(ci)) * CENTER_EPS + TINY
    wrad = (((azu + azu) + rad) * rad + crad + cerr) * RAD_INFL + TINY
    return wr, wi, wrad


def linquad_step(zr, zi, rad, lr, li, lrad):
    """One step z -> lam*z + z^2 on arrays of balls; lam a single ball."""
    s = zr * zr + zi * zi
    al2 = lr * lr + li * li
    wr = (lr * zr - li * zi) + (zr * zr - zi * zi)
    wi = (lr * zi + li * zr) + 2.0 * (zr * zi)
    az = np.sqrt(s) * SQRT_INFL
    al = np.sqrt(al2) * SQRT_INFL
    cerr = (al2 + 3.0 * s) * CENTER_EPS + TINY
    wrad = (al * rad + lrad * (az + rad) + ((az + az) + rad) * rad + cerr) * RAD_INFL + TINY
    return wr, wi, wrad


def _cmul(ar, ai, arad, br, bi, brad):
    """Ball complex product (arrays x arrays or scalar mix)."""
    wr = ar * br - ai * bi
    wi = ar * bi + ai * br
    aa = np.sqrt(ar * ar + ai * ai) * SQRT_INFL
    ab = np.sqrt(br * br + bi * bi) * SQRT_INFL
    cerr = (aa * ab + aa * ab) * CENTER_EPS + TINY
    wrad = (aa * brad + ab * arad + arad * brad + cerr) * RAD_INFL + TINY
    return wr, wi, wrad


def poly_eval(coef_r, coef_i, coef_rad, zr, zi, rad):
    """Horner evaluation of a ball-coefficient polynomial on arrays of
    balls.  Coefficients are highest-degree first."""
    zr = np.asarray(zr, dtype=np.float64)
    wr = np.full_like(zr, coef_r[0], dtype=np.float64)
    wi = np.full_like(zr, coef_i[0], dtype=np.float64)
    wrad = np.full_like(zr, coef_rad[0], dtype=np.float64)
    for k in range(1, len(coef_r)):
        wr, wi, wrad = _cmul(wr, wi, wrad, zr, zi, rad)
        wr = wr + coef_r[k]
        wi = wi + coef_i[k]
        add_err = (abs(wr) + abs(wi)) * CENTER_EPS + TINY
        wrad = wrad + coef_rad[k] + add_err
    return wr, wi, wrad


def orbit_quad(z0r, z0i, rad0, cr, ci, crad, nsteps, rmax, radcap):
    """Iterate one ball orbit under z^2+c.

    Returns (zr, zi, rad, steps_done, status) with status
    0 = ran all steps, 1 = certified escape (|z| - rad > rmax),
    2 = radius blow-up past radcap (precision exhausted).
    """
    zr, zi, rad = float(z0r), float(z0i), float(rad0)
    import math
    for k in range(nsteps):
        s = zr * zr + zi * zi
        if math.sqrt(s) * (1.0 - 3e-16) - rad > rmax:
            return zr, zi, rad, k, 1
        if rad > radcap or not math.isfinite(s):
            return zr, zi, rad, k, 2
        wr = (zr * zr - zi * zi) + cr
        wi = 2.0 * (zr * zi) + ci
        azu = math.sqrt(s) * SQRT_INFL
        cerr = (s + s + abs(cr) + abs(ci)) * CENTER_EPS + TINY
        wrad = (((azu + azu) + rad) * rad + crad + cerr) * RAD_INFL + TINY
        zr, zi, rad = wr, wi, wrad
    return zr, zi, rad, nsteps, 0


def orbit_linquad_minabs(z0r, z0i, rad0, lr, li, lrad, nsteps, radcap):
    """Iterate one ball orbit under lam*z + z^2, tracking certified
    bounds on min_k |z_k|.

    Returns (min_lo, min_hi, steps_done, status); status as orbit_quad
    (0 ok, 2 radius blow-up).  min_lo <= min_k |z_k| <= min_hi over the
    steps actually performed, including step 0.
    """
    import math
    zr, zi, rad = float(z0r), float(z0i), float(rad0)
    min_lo = math.inf
    min_hi = math.inf
    for k in range(nsteps):
        a = math.sqrt(zr * zr + zi * zi)
        lo = a * (1.0 - 3e-16) - rad
        hi = a * SQRT_INFL + rad
        if lo < min_lo:
            min_lo = lo
        if hi < min_hi:
            min_hi = hi
        if rad > radcap:
            return min_lo, min_hi, k, 2
        s = zr * zr + zi * zi
        wr = (lr * zr - li * zi) + (zr * zr - zi * zi)
        wi = (lr * zi + li * zr) + 2.0 * (zr * zi)
        az = math.sqrt(s) * SQRT_INFL
        al = math.sqrt(lr * lr + li * li) * SQRT_INFL
        cerr = (al * al + 3.0 * s) * CENTER_EPS + TINY
        wrad = (al * rad + lrad * (az + rad) + ((az + az) + rad) * rad + cerr) * RAD_INFL + TINY
        zr, zi, rad = wr, wi, wrad
    return min_lo, min_hi, nsteps, 0


def _prefix(mask):
    p = np.zeros((mask.shape[0] + 1, mask.shape[1] + 1), dtype=np.int64)
    p[1:, 1:] = np.cumsum(np.cumsum(mask.astype(np.int64), axis=0), axis=1)
    return p


def rect_any(mask, i0, i1, j0, j1):
    """For index-rectangle queries [i0..i1] x [j0..j1] (inclusive, arrays):
    does the boolean mask contain any True cell there?  Out-of-range parts
    count as False."""
    p = _prefix(mask)
    ni, nj = mask.shape
    a0 = np.clip(i0, 0, ni)
    a1 = np.clip(i1 + 1, 0, ni)
    b0 = np.clip(j0, 0, nj)
    b1 = np.clip(j1 + 1, 0, nj)
    cnt = p[a1, b1] - p[a0, b1] - p[a1, b0] + p[a0, b0]
    return cnt > 0


def rect_all(mask, i0, i1, j0, j1):
    """Are all cells of the (clipped) rectangle True AND the rectangle
    entirely inside the grid?"""
    p = _prefix(mask)
    ni, nj = mask.shape
    inside = (i0 >= 0) & (j0 >= 0) & (i1 < ni) & (j1 < nj) & (i0 <= i1) & (j0 <= j1)
    a0 = np.clip(i0, 0, ni)
    a1 = np.clip(i1 + 1, 0, ni)
    b0 = np.clip(j0, 0, nj)
    b1 = np.clip(j1 + 1, 0, nj)
    cnt = p[a1, b1] - p[a0, b1] - p[a1, b0] + p[a0, b0]
    area = (a1 - a0) * (b1 - b0)
    return inside & (cnt == area) & (area > 0)
