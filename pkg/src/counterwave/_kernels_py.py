"""Pure-Python implementations of the numerical hot loops.

Mirrors ``_kernels.pyx`` function for function; ``counterwave.kernels`` picks
the compiled module when it is importable and falls back to this one.
"""
import math

from ._dop853_tableau import A, B, C, E3, E5, N_STAGES

_RF_TOL_FACTOR = (3.0e-16) ** (-1.0 / 6.0)
_RD_TOL_FACTOR = (0.25e-16) ** (-1.0 / 6.0)
_RESCALE_AT = 1.0e100


def carlson_rf(x, y, z):
    """Carlson symmetric integral R_F(x, y, z) by duplication.

    Arguments must be non-negative with at most one of them zero.
    """
    if x < 0.0 or y < 0.0 or z < 0.0:
        raise ValueError("carlson_rf: negative argument")
    a0 = (x + y + z) / 3.0
    an = a0
    q = _RF_TOL_FACTOR * max(abs(a0 - x), abs(a0 - y), abs(a0 - z))
    xn, yn, zn = x, y, z
    pow4 = 1.0
    while pow4 * q >= abs(an):
        sx, sy, sz = math.sqrt(xn), math.sqrt(yn), math.sqrt(zn)
        lam = sx * sy + sy * sz + sz * sx
        xn = 0.25 * (xn + lam)
        yn = 0.25 * (yn + lam)
        zn = 0.25 * (zn + lam)
        an = 0.25 * (an + lam)
        pow4 *= 0.25
    if an == 0.0:
        return math.inf
    xx = (a0 - x) * pow4 / an
    yy = (a0 - y) * pow4 / an
    zz = -xx - yy
    e2 = xx * yy - zz * zz
    e3 = xx * yy * zz
    return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / math.sqrt(an)


def carlson_rd(x, y, z):
    """Carlson symmetric integral R_D(x, y, z); x, y >= 0 (not both zero), z > 0."""
    if x < 0.0 or y < 0.0 or z <= 0.0:
        raise ValueError("carlson_rd: invalid argument")
    a0 = (x + y + 3.0 * z) / 5.0
    an = a0
    q = _RD_TOL_FACTOR * max(abs(a0 - x), abs(a0 - y), abs(a0 - z))
    xn, yn, zn = x, y, z
    pow4 = 1.0
    acc = 0.0
    while pow4 * q >= abs(an):
        sx, sy, sz = math.sqrt(xn), math.sqrt(yn), math.sqrt(zn)
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
    return pow4 * series / (an * math.sqrt(an)) + 3.0 * acc


def jacobi_am(u, m):
    """Jacobi amplitude for 0 <= m < 1 by the AGM / descending Landen scheme."""
    if not 0.0 <= m < 1.0:
        raise ValueError("jacobi_am kernel needs 0 <= m < 1")
    if m == 0.0:
        return u
    a = 1.0
    b = math.sqrt(1.0 - m)
    c = math.sqrt(m)
    avals = [a]
    cvals = [c]
    while abs(c) > 1e-16 * a and len(avals) < 64:
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        avals.append(a)
        cvals.append(c)
    n = len(avals) - 1
    phi = math.ldexp(avals[n] * u, n)
    for k in range(n, 0, -1):
        phi = 0.5 * (phi + math.asin(cvals[k] / avals[k] * math.sin(phi)))
    return phi


def jacobi_am_array(u, m):
    return [jacobi_am(float(v), m) for v in u]


def _mathieu_rhs(x, y, lam, q, sc, out):
    v = lam - 2.0 * q * math.cos(2.0 * x)
    out[0] = y[1]
    out[1] = -v * y[0]
    out[2] = y[3]
    out[3] = -v * y[2]
    s1, c1 = math.sin(y[4]), math.cos(y[4])
    s2, c2 = math.sin(y[5]), math.cos(y[5])
    out[4] = sc * c1 * c1 + (v / sc) * s1 * s1
    out[5] = sc * c2 * c2 + (v / sc) * s2 * s2


def mathieu_half_period(lam, q, rtol=1e-12, atol=1e-14, max_steps=50_000_000):
    """Integrate the two fundamental Mathieu solutions over [0, pi/2].

    Solves F'' + (lam - 2 q cos 2x) F = 0 for the even solution (1, 0) and the
    odd solution (0, 1) together with scaled Pruefer angles that count their
    zeros. Amplitudes are renormalised on the fly so deep gaps cannot overflow.

    Returns
    -------
    tuple
        ``(y1, dy1, y2, dy2, log1, log2, theta1, theta2, nsteps, status)``
        where the true solutions are ``exp(log_i) * (y_i, dy_i)``; status is
        0 on success, 1 on step-size underflow and 2 when max_steps is hit.
    """
    sc = math.sqrt(max(1.0, abs(lam) + 2.0 * abs(q)))
    x = 0.0
    x_end = 0.5 * math.pi
    y = [1.0, 0.0, 0.0, 1.0, 0.5 * math.pi, 0.0]
    log1 = 0.0
    log2 = 0.0
    dim = 6
    k = [[0.0] * dim for _ in range(N_STAGES + 1)]
    _mathieu_rhs(x, y, lam, q, sc, k[0])
    h = min(0.1, 0.5 / sc)
    h_min = 1e-15 * x_end
    ytmp = [0.0] * dim
    ynew = [0.0] * dim
    rejected = False
    nsteps = 0
    status = 0
    while x < x_end:
        if nsteps >= max_steps:
            status = 2
            break
        if h < h_min:
            status = 1
            break
        if x + h > x_end:
            h = x_end - x
        for s in range(1, N_STAGES):
            a_s = A[s]
            for i in range(dim):
                acc = 0.0
                for j in range(s):
                    acc += a_s[j] * k[j][i]
                ytmp[i] = y[i] + h * acc
            _mathieu_rhs(x + C[s] * h, ytmp, lam, q, sc, k[s])
        for i in range(dim):
            acc = 0.0
            for j in range(N_STAGES):
                acc += B[j] * k[j][i]
            ynew[i] = y[i] + h * acc
        _mathieu_rhs(x + h, ynew, lam, q, sc, k[N_STAGES])

        r1 = max(math.hypot(y[0], y[1] / sc), math.hypot(ynew[0], ynew[1] / sc))
        r2 = max(math.hypot(y[2], y[3] / sc), math.hypot(ynew[2], ynew[3] / sc))
        err5 = 0.0
        err3 = 0.0
        for i in range(dim):
            if i == 0:
                scale = atol + rtol * r1
            elif i == 1:
                scale = atol + rtol * sc * r1
            elif i == 2:
                scale = atol + rtol * r2
            elif i == 3:
                scale = atol + rtol * sc * r2
            else:
                scale = atol + rtol * max(1.0, abs(y[i]), abs(ynew[i]))
            e5 = 0.0
            e3 = 0.0
            for j in range(N_STAGES + 1):
                e5 += E5[j] * k[j][i]
                e3 += E3[j] * k[j][i]
            e5 /= scale
            e3 /= scale
            err5 += e5 * e5
            err3 += e3 * e3
        if err5 == 0.0 and err3 == 0.0:
            err = 0.0
        else:
            err = abs(h) * err5 / math.sqrt((err5 + 0.01 * err3) * dim)

        if err < 1.0:
            if err == 0.0:
                factor = 10.0
            else:
                factor = min(10.0, 0.9 * err ** (-0.125))
            if rejected:
                factor = min(1.0, factor)
            x += h
            y, ynew = ynew, y
            k[0], k[N_STAGES] = k[N_STAGES], k[0]
            nsteps += 1
            rejected = False
            if r1 > _RESCALE_AT:
                r = math.hypot(y[0], y[1] / sc)
                y[0] /= r
                y[1] /= r
                k[0][0] /= r
                k[0][1] /= r
                log1 += math.log(r)
            if r2 > _RESCALE_AT:
                r = math.hypot(y[2], y[3] / sc)
                y[2] /= r
                y[3] /= r
                k[0][2] /= r
                k[0][3] /= r
                log2 += math.log(r)
            h *= factor
        else:
            h *= max(0.2, 0.9 * err ** (-0.125))
            rejected = True

    # Lift the exact angles of the final (y, y') to the integrated branch.
    th1 = _lift_angle(math.atan2(y[0], y[1] / sc), y[4])
    th2 = _lift_angle(math.atan2(y[2], y[3] / sc), y[5])
    return (y[0], y[1], y[2], y[3], log1, log2, th1, th2, nsteps, status)


def _lift_angle(exact, approx):
    return exact + 2.0 * math.pi * round((approx - exact) / (2.0 * math.pi))
