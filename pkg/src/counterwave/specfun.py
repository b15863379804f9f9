"""Special functions: Jacobi amplitude, elliptic integrals, Bessel J and the
Mathieu characteristic (Floquet) exponent.

Parameters follow the "parameter m" convention (m = k^2), so that
``F(phi|m) = int_0^phi dtheta / sqrt(1 - m sin^2 theta)``.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy import special
from scipy.integrate import solve_ivp
from scipy.linalg import eigvalsh_tridiagonal
from scipy.optimize import brentq

from . import kernels
from .errors import ConfigError, NonConvergenceError

__all__ = [
    "jacobi_am", "jacobi_dn", "elliptic_f", "elliptic_e", "ellipk", "ellipe",
    "bessel_j", "MathieuSpec", "FloquetExponent", "mathieu_nu", "hill_nu",
    "solve_mathieu", "MathieuSolution",
]

HALF_PI = 0.5 * math.pi


def _elementwise(func):
    """Lift a scalar function of (x, m) to numpy arrays in its first argument."""
    vec = np.vectorize(func, otypes=[float])

    def wrapper(x, m):
        if np.ndim(x) == 0:
            return func(float(x), float(m))
        return vec(np.asarray(x, dtype=float), float(m))

    wrapper.__name__ = func.__name__
    wrapper.__doc__ = func.__doc__
    return wrapper


def _check_param(m):
    if not math.isfinite(m):
        raise ConfigError(f"elliptic parameter must be finite, got {m!r}")
    if m > 1.0:
        raise ConfigError(f"elliptic parameter m={m!r} > 1 is not supported")


def ellipk(m):
    """Complete elliptic integral of the first kind K(m) for m <= 1."""
    m = float(m)
    _check_param(m)
    if m == 1.0:
        return math.inf
    return kernels.carlson_rf(0.0, 1.0 - m, 1.0)


def ellipe(m):
    """Complete elliptic integral of the second kind E(m) for m <= 1."""
    m = float(m)
    _check_param(m)
    if m == 1.0:
        return 1.0
    y = 1.0 - m
    return kernels.carlson_rf(0.0, y, 1.0) - m / 3.0 * kernels.carlson_rd(0.0, y, 1.0)


def _reduce_angle(phi):
    j = round(phi / math.pi)
    return j, phi - j * math.pi


@_elementwise
def elliptic_f(phi, m):
    """Incomplete elliptic integral of the first kind F(phi|m), m <= 1.

    Extended quasi-periodically, F(phi + pi|m) = F(phi|m) + 2K(m).
    """
    _check_param(m)
    j, r = _reduce_angle(phi)
    s = math.sin(r)
    c = math.cos(r)
    if m == 1.0:
        if j != 0 or abs(r) == HALF_PI:
            return math.copysign(math.inf, phi)
        return math.atanh(s)
    base = s * kernels.carlson_rf(c * c, 1.0 - m * s * s, 1.0)
    return base + 2.0 * j * ellipk(m) if j else base


@_elementwise
def elliptic_e(phi, m):
    """Incomplete elliptic integral of the second kind E(phi|m), m <= 1.

    Extended quasi-periodically, E(phi + pi|m) = E(phi|m) + 2E(pi/2|m).
    """
    _check_param(m)
    j, r = _reduce_angle(phi)
    s = math.sin(r)
    if m == 1.0:
        base = s
    elif s == 0.0:
        base = 0.0
    else:
        c2 = math.cos(r) ** 2
        d2 = 1.0 - m * s * s
        base = s * kernels.carlson_rf(c2, d2, 1.0) - m / 3.0 * s ** 3 * kernels.carlson_rd(c2, d2, 1.0)
    return base + 2.0 * j * ellipe(m) if j else base


@_elementwise
def jacobi_am(u, m):
    """Jacobi amplitude am(u|m), the inverse of F(.|m), for any real m <= 1.

    Uses the AGM scheme for 0 <= m < 1, the imaginary-modulus transformation
    for m < 0 and the Gudermannian for m = 1.
    """
    _check_param(m)
    if m == 1.0:
        return 2.0 * math.atan(math.tanh(0.5 * u))
    if m >= 0.0:
        return kernels.jacobi_am(u, m)
    big = -m
    root = math.sqrt(1.0 + big)
    phi = kernels.jacobi_am(u * root, big / (1.0 + big))
    # am(u|-M) = atan2(sn/sqrt(1+M), cn) of the transformed argument,
    # continued across branches so the result stays monotone in u.
    j, r = _reduce_angle(phi)
    return j * math.pi + math.atan2(math.sin(r), root * math.cos(r))


def jacobi_dn(u, m):
    """Jacobi dn(u|m) = sqrt(1 - m sin^2 am(u|m)) for m <= 1."""
    phi = jacobi_am(u, m)
    return np.sqrt(1.0 - m * np.sin(phi) ** 2)


def bessel_j(s, z):
    """Bessel function of the first kind J_s(z) of integer order s."""
    return special.jv(s, z)


@dataclass(frozen=True)
class MathieuSpec:
    """Parameters of F'' + (lam - 2 q cos 2y) F = 0."""

    lam: float
    q: float

    def __post_init__(self):
        if not (math.isfinite(self.lam) and math.isfinite(self.q)):
            raise ConfigError("Mathieu parameters must be finite")


@dataclass(frozen=True)
class FloquetExponent:
    """Characteristic exponent nu with J(y + pi) = exp(i pi nu) J(y).

    ``nu_re`` is the continuity-fixed branch (nu(lam, 0) = sqrt(lam) for
    lam > 0); ``nu_im >= 0``. ``log_abs_cos`` is log|cos(pi nu)|, which stays
    finite when the gap is so deep that cos(pi nu) itself overflows.
    """

    nu_re: float
    nu_im: float
    is_band: bool
    log_abs_cos: float = 0.0
    nsteps: int = 0

    @property
    def nu(self):
        return complex(self.nu_re, self.nu_im)

    @property
    def multiplier(self):
        """Floquet multiplier exp(i pi nu), invariant under nu -> nu + 2."""
        return np.exp(1j * math.pi * self.nu)


def _as_spec(spec, q):
    if isinstance(spec, MathieuSpec):
        return spec
    return MathieuSpec(float(spec), float(q))


def _signed_log_product(a, b, shift):
    """Sign and log-magnitude of a * b * exp(shift)."""
    if a == 0.0 or b == 0.0:
        return 0.0, -math.inf
    sign = math.copysign(1.0, a) * math.copysign(1.0, b)
    return sign, math.log(abs(a)) + math.log(abs(b)) + shift


def _asinh_sqrt(log_x):
    """(2/pi) asinh(sqrt(X)) given log X."""
    if log_x > 40.0:
        return (0.5 * log_x + math.log(2.0)) / HALF_PI
    return math.asinh(math.exp(0.5 * log_x)) / HALF_PI


def mathieu_nu(spec, q=None, *, rtol=1e-12, atol=1e-14, band_tol=1e-9, edge_tol=None,
               max_steps=50_000_000):
    """Characteristic exponent of the Mathieu equation.

    The even and odd fundamental solutions are integrated over half a period
    with an adaptive 8th-order Runge-Kutta scheme. With A = y1 y2' and
    B = -y1' y2 at y = pi/2 one has A + B = 1 and cos(pi nu) = A - B, so in a
    band A = cos^2(pi nu / 2) and B = sin^2(pi nu / 2). The integer part of nu
    comes from the number of zeros of the two solutions, counted with Pruefer
    angles, which fixes the branch by continuity from the Q = 0 axis.

    Parameters
    ----------
    spec : MathieuSpec or float
        Parameters, or lambda when ``q`` is also given.
    q : float, optional
        Coupling Q when ``spec`` is a number.
    rtol, atol : float
        Integrator tolerances.
    band_tol : float
        Threshold on |Im nu| below which the point is classified as a band.
    edge_tol : float, optional
        Values of A or B whose magnitude is below this are treated as zero,
        absorbing round-off at coexistence points such as (lam, Q) = (n^2, 0).
        Defaults to 100 * rtol.

    Returns
    -------
    FloquetExponent

    Raises
    ------
    NonConvergenceError
        If the integrator underflows its step size or exhausts ``max_steps``.
    """
    spec = _as_spec(spec, q)
    if edge_tol is None:
        edge_tol = 100.0 * rtol
    y1, dy1, y2, dy2, log1, log2, th1, th2, nsteps, status = kernels.mathieu_half_period(
        spec.lam, spec.q, rtol, atol, max_steps)
    if status != 0:
        reason = "step size underflow" if status == 1 else "step limit reached"
        raise NonConvergenceError(
            f"Mathieu half-period integration failed ({reason}) at "
            f"lam={spec.lam!r}, q={spec.q!r}")
    shift = log1 + log2
    sign_a, log_a = _signed_log_product(y1, dy2, shift)
    sign_b, log_b = _signed_log_product(-dy1, y2, shift)
    n_zero = math.floor(th1 / math.pi) + math.floor(th2 / math.pi)

    big = max(log_a, log_b)
    if big < 700.0:
        a_val = sign_a * math.exp(log_a)
        b_val = sign_b * math.exp(log_b)
        if abs(a_val) < edge_tol:
            a_val = 0.0
        if abs(b_val) < edge_tol:
            b_val = 0.0
        log_abs_cos = math.log(abs(a_val - b_val)) if a_val != b_val else -math.inf
        if a_val >= 0.0 and b_val >= 0.0:
            nu0 = math.atan2(math.sqrt(b_val), math.sqrt(a_val)) / HALF_PI
            nu_re = n_zero + nu0 if n_zero % 2 == 0 else n_zero + 1 - nu0
            return FloquetExponent(float(nu_re), 0.0, True, log_abs_cos, nsteps)
        if b_val < 0.0:
            mu = _asinh_sqrt(math.log(-b_val))
            parity = 0
        else:
            mu = _asinh_sqrt(math.log(-a_val))
            parity = 1
    else:
        # Deep gap: exactly one of A, B is hugely negative, the other positive.
        log_abs_cos = big + math.log(2.0)
        if sign_b < 0.0 and log_b >= log_a:
            mu = _asinh_sqrt(log_b)
            parity = 0
        else:
            mu = _asinh_sqrt(log_a)
            parity = 1
    n_gap = n_zero if n_zero % 2 == parity else n_zero + 1
    return FloquetExponent(float(n_gap), float(mu), mu < band_tol, log_abs_cos, nsteps)


def hill_nu(spec, q=None, *, size=None):
    """Band-interior exponent from a truncated Hill matrix (cross-check oracle).

    Solutions exp(i nu y) sum_n c_n exp(2 i n y) turn the Mathieu equation
    into the symmetric tridiagonal eigenproblem diag((nu + 2n)^2) with
    off-diagonal Q. The j-th eigenvalue traces band j as nu runs over
    [j, j + 1]; the exponent is found by root bracketing.

    Returns
    -------
    float or None
        The real exponent, or None when (lam, Q) lies in a gap.
    """
    spec = _as_spec(spec, q)
    lam, qq = spec.lam, spec.q
    if size is None:
        size = int(0.5 * math.sqrt(abs(lam) + 2.0 * abs(qq))) + 2 * int(math.sqrt(abs(qq))) + 24
    n = np.arange(-size, size + 1)
    off = np.full(2 * size, qq)

    def eig(nu_frac, j):
        return eigvalsh_tridiagonal((nu_frac + 2.0 * n) ** 2, off,
                                    select="i", select_range=(j, j))[0]

    jmax = 2 * size - 8
    for j in range(jmax):
        lo, hi = eig(0.0, j), eig(1.0, j)
        if min(lo, hi) <= lam <= max(lo, hi):
            frac = brentq(lambda v: eig(v, j) - lam, 0.0, 1.0, xtol=1e-15, rtol=1e-15)
            return j + frac if j % 2 == 0 else j + 1 - frac
        if min(lo, hi) > lam:
            return None
    raise ConfigError("Hill matrix truncation too small for these parameters")


@dataclass
class MathieuSolution:
    """Dense numerical solution of the Mathieu equation.

    Calling the object at points ``y`` returns an array of shape (2, ...)
    holding F and F'.
    """

    spec: MathieuSpec
    y0: float
    y1: float
    _sol: object
    nfev: int

    def __call__(self, y):
        return self._sol(y)


def solve_mathieu(spec, y0, y1, init, *, tol=1e-10):
    """Integrate F'' + (lam - 2q cos 2y) F = 0 from y0 to y1.

    Parameters
    ----------
    spec : MathieuSpec
    y0, y1 : float
        Integration interval, y1 > y0.
    init : tuple of float
        Initial value and derivative at y0.
    tol : float
        Local relative tolerance; the absolute tolerance is tol * 1e-3.

    Raises
    ------
    NonConvergenceError
        If the integrator fails (for example step-size underflow).
    """
    spec = _as_spec(spec, None)
    if not y1 > y0:
        raise ConfigError("solve_mathieu needs y1 > y0")
    lam, q = spec.lam, spec.q

    def rhs(y, state):
        return [state[1], -(lam - 2.0 * q * math.cos(2.0 * y)) * state[0]]

    res = solve_ivp(rhs, (y0, y1), [float(init[0]), float(init[1])], method="DOP853",
                    rtol=tol, atol=tol * 1e-3, dense_output=True)
    if res.status != 0:
        raise NonConvergenceError(f"Mathieu integration failed: {res.message}",
                                  last_state=(res.t[-1], res.y[:, -1]))
    return MathieuSolution(spec, y0, y1, res.sol, res.nfev)
