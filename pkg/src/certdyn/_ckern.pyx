# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: float64 ball arithmetic over arrays.

Formula-for-formula identical to certdyn.kern.pykern (no FMA, no fast
math), so outputs are bit-identical with the pure fallback.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, isfinite, INFINITY

cnp.import_array()

cdef double CENTER_EPS = 2e-15
cdef double SQRT_INFL = 1.0 + 2e-15
cdef double RAD_INFL = 1.0 + 5e-15
cdef double TINY = 1e-290


def quad_step(cnp.ndarray zr_a, cnp.ndarray zi_a, cnp.ndarray rad_a,
              double cr, double ci, double crad):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] zr = np.ascontiguousarray(zr_a, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] zi = np.ascontiguousarray(zi_a, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rad = np.ascontiguousarray(rad_a, dtype=np.float64).ravel()
    cdef Py_ssize_t n = zr.shape[0], k
    cdef cnp.ndarray[cnp.float64_t, ndim=1] wr = np.empty(n), wi = np.empty(n), wrad = np.empty(n)
    cdef double s, azu, cerr
    for k in range(n):
        s = zr[k] * zr[k] + zi[k] * zi[k]
        wr[k] = (zr[k] * zr[k] - zi[k] * zi[k]) + cr
        wi[k] = 2.0 * (zr[k] * zi[k]) + ci
        azu = sqrt(s) * SQRT_INFL
        cerr = (s + s + fabs(cr) + fabs(ci)) * CENTER_EPS + TINY
        wrad[k] = (((azu + azu) + rad[k]) * rad[k] + crad + cerr) * RAD_INFL + TINY
    shape = np.asarray(zr_a).shape
    return wr.reshape(shape), wi.reshape(shape), wrad.reshape(shape)


def linquad_step(cnp.ndarray zr_a, cnp.ndarray zi_a, cnp.ndarray rad_a,
                 double lr, double li, double lrad):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] zr = np.ascontiguousarray(zr_a, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] zi = np.ascontiguousarray(zi_a, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rad = np.ascontiguousarray(rad_a, dtype=np.float64).ravel()
    cdef Py_ssize_t n = zr.shape[0], k
    cdef cnp.ndarray[cnp.float64_t, ndim=1] wr = np.empty(n), wi = np.empty(n), wrad = np.empty(n)
    cdef double s, al2, az, al, cerr
    for k in range(n):
        s = zr[k] * zr[k] + zi[k] * zi[k]
        al2 = lr * lr + li * li
        wr[k] = (lr * zr[k] - li * zi[k]) + (zr[k] * zr[k] - zi[k] * zi[k])
        wi[k] = (lr * zi[k] + li * zr[k]) + 2.0 * (zr[k] * zi[k])
        az = sqrt(s) * SQRT_INFL
        al = sqrt(al2) * SQRT_INFL
        cerr = (al2 + 3.0 * s) * CENTER_EPS + TINY
        wrad[k] = (al * rad[k] + lrad * (az + rad[k]) + ((az + az) + rad[k]) * rad[k] + cerr) * RAD_INFL + TINY
    shape = np.asarray(zr_a).shape
    return wr.reshape(shape), wi.reshape(shape), wrad.reshape(shape)


def poly_eval(coef_r_a, coef_i_a, coef_rad_a,
              cnp.ndarray zr_a, cnp.ndarray zi_a, cnp.ndarray rad_a):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cr = np.ascontiguousarray(coef_r_a, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ci = np.ascontiguousarray(coef_i_a, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] crad = np.ascontiguousarray(coef_rad_a, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] zr = np.ascontiguousarray(zr_a, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] zi = np.ascontiguousarray(zi_a, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rad = np.ascontiguousarray(rad_a, dtype=np.float64).ravel()
    cdef Py_ssize_t n = zr.shape[0], deg = cr.shape[0], k, j
    cdef cnp.ndarray[cnp.float64_t, ndim=1] wr = np.empty(n), wi = np.empty(n), wrad = np.empty(n)
    cdef double ar, ai, arad, br, bi, brad, aa, ab, cerr, tr, ti, add_err
    for k in range(n):
        ar = cr[0]; ai = ci[0]; arad = crad[0]
        br = zr[k]; bi = zi[k]; brad = rad[k]
        for j in range(1, deg):
            tr = ar * br - ai * bi
            ti = ar * bi + ai * br
            aa = sqrt(ar * ar + ai * ai) * SQRT_INFL
            ab = sqrt(br * br + bi * bi) * SQRT_INFL
            cerr = (aa * ab + aa * ab) * CENTER_EPS + TINY
            arad = (aa * brad + ab * arad + arad * brad + cerr) * RAD_INFL + TINY
            ar = tr + cr[j]
            ai = ti + ci[j]
            add_err = (fabs(ar) + fabs(ai)) * CENTER_EPS + TINY
            arad = arad + crad[j] + add_err
        wr[k] = ar; wi[k] = ai; wrad[k] = arad
    shape = np.asarray(zr_a).shape
    return wr.reshape(shape), wi.reshape(shape), wrad.reshape(shape)


def orbit_quad(double z0r, double z0i, double rad0,
               double cr, double ci, double crad,
               long nsteps, double rmax, double radcap):
    cdef double zr = z0r, zi = z0i, rad = rad0
    cdef double s, wr, wi, azu, cerr, wrad
    cdef long k
    for k in range(nsteps):
        s = zr * zr + zi * zi
        if sqrt(s) * (1.0 - 3e-16) - rad > rmax:
            return zr, zi, rad, k, 1
        if rad > radcap or not isfinite(s):
            return zr, zi, rad, k, 2
        wr = (zr * zr - zi * zi) + cr
        wi = 2.0 * (zr * zi) + ci
        azu = sqrt(s) * SQRT_INFL
        cerr = (s + s + fabs(cr) + fabs(ci)) * CENTER_EPS + TINY
        wrad = (((azu + azu) + rad) * rad + crad + cerr) * RAD_INFL + TINY
        zr = wr; zi = wi; rad = wrad
    return zr, zi, rad, nsteps, 0


def orbit_linquad_minabs(double z0r, double z0i, double rad0,
                         double lr, double li, double lrad,
                         long nsteps, double radcap):
    cdef double zr = z0r, zi = z0i, rad = rad0
    cdef double min_lo = INFINITY, min_hi = INFINITY
    cdef double a, lo, hi, s, wr, wi, az, al, cerr, wrad
    cdef long k
    for k in range(nsteps):
        a = sqrt(zr * zr + zi * zi)
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
        az = sqrt(s) * SQRT_INFL
        al = sqrt(lr * lr + li * li) * SQRT_INFL
        cerr = (al * al + 3.0 * s) * CENTER_EPS + TINY
        wrad = (al * rad + lrad * (az + rad) + ((az + az) + rad) * rad + cerr) * RAD_INFL + TINY
        zr = wr; zi = wi; rad = wrad
    return min_lo, min_hi, nsteps, 0


def _prefix(mask):
    p = np.zeros((mask.shape[0] + 1, mask.shape[1] + 1), dtype=np.int64)
    p[1:, 1:] = np.cumsum(np.cumsum(mask.astype(np.int64), axis=0), axis=1)
    return p


def rect_any(mask, i0_a, i1_a, j0_a, j1_a):
    cdef cnp.ndarray[cnp.int64_t, ndim=2] p = _prefix(mask)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] i0 = np.ascontiguousarray(i0_a, dtype=np.int64).ravel()
    cdef cnp.ndarray[cnp.int64_t, ndim=1] i1 = np.ascontiguousarray(i1_a, dtype=np.int64).ravel()
    cdef cnp.ndarray[cnp.int64_t, ndim=1] j0 = np.ascontiguousarray(j0_a, dtype=np.int64).ravel()
    cdef cnp.ndarray[cnp.int64_t, ndim=1] j1 = np.ascontiguousarray(j1_a, dtype=np.int64).ravel()
    cdef Py_ssize_t n = i0.shape[0], k
    cdef long ni = mask.shape[0], nj = mask.shape[1]
    cdef long a0, a1, b0, b1
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] out = np.zeros(n, dtype=np.uint8)
    for k in range(n):
        a0 = i0[k];  a1 = i1[k] + 1
        b0 = j0[k];  b1 = j1[k] + 1
        if a0 < 0: a0 = 0
        if a0 > ni: a0 = ni
        if a1 < 0: a1 = 0
        if a1 > ni: a1 = ni
        if b0 < 0: b0 = 0
        if b0 > nj: b0 = nj
        if b1 < 0: b1 = 0
        if b1 > nj: b1 = nj
        if p[a1, b1] - p[a0, b1] - p[a1, b0] + p[a0, b0] > 0:
            out[k] = 1
    return out.view(np.bool_).reshape(np.asarray(i0_a).shape)


def rect_all(mask, i0_a, i1_a, j0_a, j1_a):
    cdef cnp.ndarray[cnp.int64_t, ndim=2] p = _prefix(mask)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] i0 = np.ascontiguousarray(i0_a, dtype=np.int64).ravel()
    cdef cnp.ndarray[cnp.int64_t, ndim=1] i1 = np.ascontiguousarray(i1_a, dtype=np.int64).ravel()
    cdef cnp.ndarray[cnp.int64_t, ndim=1] j0 = np.ascontiguousarray(j0_a, dtype=np.int64).ravel()
    cdef cnp.ndarray[cnp.int64_t, ndim=1] j1 = np.ascontiguousarray(j1_a, dtype=np.int64).ravel()
    cdef Py_ssize_t n = i0.shape[0], k
    cdef long ni = mask.shape[0], nj = mask.shape[1]
    cdef long a0, a1, b0, b1, area
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] out = np.zeros(n, dtype=np.uint8)
    for k in range(n):
        if i0[k] < 0 or j0[k] < 0 or i1[k] >= ni or j1[k] >= nj or i0[k] > i1[k] or j0[k] > j1[k]:
            continue
        a0 = i0[k];  a1 = i1[k] + 1
        b0 = j0[k];  b1 = j1[k] + 1
        area = (a1 - a0) * (b1 - b0)
        if p[a1, b1] - p[a0, b1] - p[a1, b0] + p[a0, b0] == area and area > 0:
            out[k] = 1
    return out.view(np.bool_).reshape(np.asarray(i0_a).shape)
