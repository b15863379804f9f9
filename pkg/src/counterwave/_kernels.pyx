# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical hot loops.

Same algorithms and signatures as ``_kernels_py``; the heavy routines run
without the GIL so sweeps can use threads.
"""
from libc.math cimport sqrt, sin, cos, asin, atan2, fabs, log, pow, ldexp, hypot, M_PI, INFINITY, round as cround

import numpy as np

from ._dop853_tableau import A as _A, B as _B, C as _C, E3 as _E3, E5 as _E5, N_STAGES as _NS

cdef enum:
    NS = 12
    DIM = 6

cdef double TA[NS][NS]
cdef double TB[NS]
cdef double TC[NS]
cdef double TE3[NS + 1]
cdef double TE5[NS + 1]

if _NS != NS:
    raise ImportError("DOP853 tableau size mismatch")
for _i in range(NS):
    for _j in range(NS):
        TA[_i][_j] = _A[_i][_j]
    TB[_i] = _B[_i]
    TC[_i] = _C[_i]
for _i in range(NS + 1):
    TE3[_i] = _E3[_i]
    TE5[_i] = _E5[_i]

cdef double RF_TOL_FACTOR = pow(3.0e-16, -1.0 / 6.0)
cdef double RD_TOL_FACTOR = pow(0.25e-16, -1.0 / 6.0)
cdef double RESCALE_AT = 1.0e100


cdef double _rf(double x, double y, double z) noexcept nogil:
    cdef double a0 = (x + y + z) / 3.0
    cdef double an = a0
    cdef double q = RF_TOL_FACTOR * max(fabs(a0 - x), max(fabs(a0 - y), fabs(a0 - z)))
    cdef double xn = x, yn = y, zn = z, pow4 = 1.0
    cdef double sx, sy, sz, lam, xx, yy, zz, e2, e3
    while pow4 * q >= fabs(an):
        sx = sqrt(xn)
        sy = sqrt(yn)
        sz = sqrt(zn)
        lam = sx * sy + sy * sz + sz * sx
        xn = 0.25 * (xn + lam)
        yn = 0.25 * (yn + lam)
        zn = 0.25 * (zn + lam)
        an = 0.25 * (an + lam)
        pow4 *= 0.25
    if an == 0.0:
        return INFINITY
    xx = (a0 - x) * pow4 / an
    yy = (a0 - y) * pow4 / an
    zz = -xx - yy
    e2 = xx * yy - zz * zz
    e3 = xx * yy * zz
    return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / sqrt(an)


cdef double _rd(double x, double y, double z) noexcept nogil:
    cdef double a0 = (x + y + 3.0 * z) / 5.0
    cdef double an = a0
    cdef double q = RD_TOL_FACTOR * max(fabs(a0 - x), max(fabs(a0 - y), fabs(a0 - z)))
    cdef double xn = x, yn = y, zn = z, pow4 = 1.0, acc = 0.0
    cdef double sx, sy, sz, lam, xx, yy, zz, xy, z2, e2, e3, e4, e5, series
    while pow4 * q >= fabs(an):
        sx = sqrt(xn)
        sy = sqrt(yn)
        sz = sqrt(zn)
        lam = sx * sy + sy * sz + sz * sx
        acc += pow4 / (sz * (zn + lam))
        xn = 0.25 * (xn + lam)
        yn = 0.25 * (yn + lam)
        zn = 0.25 * (zn + lam)
        an = 0.25 * (an + lam)
        pow4 *= 0.25
    xx = (a0 - x) * pow4 / an
    yy = (a0 - y) * pow4 / an
    zz = -(xx + yy) / 3.0
    xy = xx * yy
    z2 = zz * zz
    e2 = xy - 6.0 * z2
    e3 = (3.0 * xy - 8.0 * z2) * zz
    e4 = 3.0 * (xy - z2) * z2
    e5 = xy * z2 * zz
    series = (1.0 - 3.0 * e2 / 14.0 + e3 / 6.0 + 9.0 * e2 * e2 / 88.0
              - 3.0 * e4 / 22.0 - 9.0 * e2 * e3 / 52.0 + 3.0 * e5 / 26.0)
    return pow4 * series / (an * sqrt(an)) + 3.0 * acc


def carlson_rf(double x, double y, double z):
    """Carlson symmetric integral R_F(x, y, z) by duplication."""
    if x < 0.0 or y < 0.0 or z < 0.0:
        raise ValueError("carlson_rf: negative argument")
    return _rf(x, y, z)


def carlson_rd(double x, double y, double z):
    """Carlson symmetric integral R_D(x, y, z); x, y >= 0 (not both zero), z > 0."""
    if x < 0.0 or y < 0.0 or z <= 0.0:
        raise ValueError("carlson_rd: invalid argument")
    return _rd(x, y, z)


cdef double _am(double u, double m) noexcept nogil:
    cdef double av[65]
    cdef double cv[65]
    cdef double a = 1.0, b, c, an, bn, cn, phi
    cdef int n = 0, k
    if m == 0.0:
        return u
    b = sqrt(1.0 - m)
    c = sqrt(m)
    av[0] = a
    cv[0] = c
    while fabs(c) > 1e-16 * a and n < 63:
        an = 0.5 * (a + b)
        bn = sqrt(a * b)
        cn = 0.5 * (a - b)
        a = an
        b = bn
        c = cn
        n += 1
        av[n] = a
        cv[n] = c
    phi = ldexp(av[n] * u, n)
    for k in range(n, 0, -1):
        phi = 0.5 * (phi + asin(cv[k] / av[k] * sin(phi)))
    return phi


def jacobi_am(double u, double m):
    """Jacobi amplitude for 0 <= m < 1 by the AGM / descending Landen scheme."""
    if not (0.0 <= m < 1.0):
        raise ValueError("jacobi_am kernel needs 0 <= m < 1")
    return _am(u, m)


def jacobi_am_array(u, double m):
    if not (0.0 <= m < 1.0):
        raise ValueError("jacobi_am kernel needs 0 <= m < 1")
    cdef double[::1] src = np.ascontiguousarray(u, dtype=np.float64).ravel()
    out = np.empty(src.shape[0], dtype=np.float64)
    cdef double[::1] dst = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(src.shape[0]):
            dst[i] = _am(src[i], m)
    return out


cdef inline void _rhs(double x, const double* y, double lam, double q, double sc,
                      double* out) noexcept nogil:
    cdef double v = lam - 2.0 * q * cos(2.0 * x)
    cdef double s1 = sin(y[4]), c1 = cos(y[4]), s2 = sin(y[5]), c2 = cos(y[5])
    out[0] = y[1]
    out[1] = -v * y[0]
    out[2] = y[3]
    out[3] = -v * y[2]
    out[4] = sc * c1 * c1 + (v / sc) * s1 * s1
    out[5] = sc * c2 * c2 + (v / sc) * s2 * s2


cdef double _lift(double exact, double approx) noexcept nogil:
    return exact + 2.0 * M_PI * cround((approx - exact) / (2.0 * M_PI))


cdef int _half_period(double lam, double q, double rtol, double atol, long max_steps,
                      double* res, long* nsteps_out) noexcept nogil:
    cdef double k[NS + 1][DIM]
    cdef double y[DIM]
    cdef double ytmp[DIM]
    cdef double ynew[DIM]
    cdef double sc = sqrt(max(1.0, fabs(lam) + 2.0 * fabs(q)))
    cdef double x = 0.0, x_end = 0.5 * M_PI
    cdef double log1 = 0.0, log2 = 0.0
    cdef double h = min(0.1, 0.5 / sc)
    cdef double h_min = 1e-15 * x_end
    cdef double acc, r1, r2, r, err5, err3, e5, e3, scale, err, factor
    cdef bint rejected = False
    cdef long nsteps = 0
    cdef int status = 0
    cdef int s, i, j
    y[0] = 1.0
    y[1] = 0.0
    y[2] = 0.0
    y[3] = 1.0
    y[4] = 0.5 * M_PI
    y[5] = 0.0
    _rhs(x, y, lam, q, sc, k[0])
    while x < x_end:
        if nsteps >= max_steps:
            status = 2
            break
        if h < h_min:
            status = 1
            break
        if x + h > x_end:
            h = x_end - x
        for s in range(1, NS):
            for i in range(DIM):
                acc = 0.0
                for j in range(s):
                    acc += TA[s][j] * k[j][i]
                ytmp[i] = y[i] + h * acc
            _rhs(x + TC[s] * h, ytmp, lam, q, sc, k[s])
        for i in range(DIM):
            acc = 0.0
            for j in range(NS):
                acc += TB[j] * k[j][i]
            ynew[i] = y[i] + h * acc
        _rhs(x + h, ynew, lam, q, sc, k[NS])

        r1 = max(hypot(y[0], y[1] / sc), hypot(ynew[0], ynew[1] / sc))
        r2 = max(hypot(y[2], y[3] / sc), hypot(ynew[2], ynew[3] / sc))
        err5 = 0.0
        err3 = 0.0
        for i in range(DIM):
            if i == 0:
                scale = atol + rtol * r1
            elif i == 1:
                scale = atol + rtol * sc * r1
            elif i == 2:
                scale = atol + rtol * r2
            elif i == 3:
                scale = atol + rtol * sc * r2
            else:
                scale = atol + rtol * max(1.0, max(fabs(y[i]), fabs(ynew[i])))
            e5 = 0.0
            e3 = 0.0
            for j in range(NS + 1):
                e5 += TE5[j] * k[j][i]
                e3 += TE3[j] * k[j][i]
            e5 /= scale
            e3 /= scale
            err5 += e5 * e5
            err3 += e3 * e3
        if err5 == 0.0 and err3 == 0.0:
            err = 0.0
        else:
            err = fabs(h) * err5 / sqrt((err5 + 0.01 * err3) * DIM)

        if err < 1.0:
            if err == 0.0:
                factor = 10.0
            else:
                factor = min(10.0, 0.9 * pow(err, -0.125))
            if rejected:
                factor = min(1.0, factor)
            x += h
            for i in range(DIM):
                y[i] = ynew[i]
                k[0][i] = k[NS][i]
            nsteps += 1
            rejected = False
            if r1 > RESCALE_AT:
                r = hypot(y[0], y[1] / sc)
                y[0] /= r
                y[1] /= r
                k[0][0] /= r
                k[0][1] /= r
                log1 += log(r)
            if r2 > RESCALE_AT:
                r = hypot(y[2], y[3] / sc)
                y[2] /= r
                y[3] /= r
                k[0][2] /= r
                k[0][3] /= r
                log2 += log(r)
            h *= factor
        else:
            h *= max(0.2, 0.9 * pow(err, -0.125))
            rejected = True

    res[0] = y[0]
    res[1] = y[1]
    res[2] = y[2]
    res[3] = y[3]
    res[4] = log1
    res[5] = log2
    res[6] = _lift(atan2(y[0], y[1] / sc), y[4])
    res[7] = _lift(atan2(y[2], y[3] / sc), y[5])
    nsteps_out[0] = nsteps
    return status


def mathieu_half_period(double lam, double q, double rtol=1e-12, double atol=1e-14,
                        long max_steps=50_000_000):
    """Integrate the two fundamental Mathieu solutions over [0, pi/2].

    Returns ``(y1, dy1, y2, dy2, log1, log2, theta1, theta2, nsteps, status)``;
    see the pure-Python twin for the meaning of each entry.
    """
    cdef double res[8]
    cdef long nsteps = 0
    cdef int status
    with nogil:
        status = _half_period(lam, q, rtol, atol, max_steps, res, &nsteps)
    return (res[0], res[1], res[2], res[3], res[4], res[5], res[6], res[7],
            nsteps, status)
