"""Klein-Gordon states in the two-wave background.

The wavefunction is written Phi = w exp(i p.x). In the two soluble cases w
depends on a single phase and the Klein-Gordon equation becomes the Mathieu
equation F'' + (lam - 2 Q cos 2y) F = 0:

* magnetic node (p_z = 0): phase phi_bar = k_bar.x, y = (phi_bar - phi0) / 2
  with phi0 = atan2(p.eps2, p.eps1), w = F exp(-i beta phi_bar),
  beta = k_bar.p / k_bar^2;
* zero transverse momentum: phase phi_Delta, y = phi_Delta / 2,
  w = F exp(-i beta phi_Delta), beta = k_Delta.p / k_Delta^2.

The module also provides the approximation hierarchy (plane-wave,
high-energy, multiple-scale) and the quasi-momenta they imply.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import ConfigError, ForbiddenRegimeError
from .relkin import Background, PlaneWave, dot
from .specfun import MathieuSpec, elliptic_e, ellipe, mathieu_nu, solve_mathieu

__all__ = [
    "volkov_exponent", "KGReduction", "kg_reduce", "forbidden_thresholds",
    "high_energy_phase", "node_high_energy_ratio", "multiscale_phase",
    "multiscale_rate", "multiscale_amplitude", "QuasiMomentum", "quasimomentum",
    "MODELS", "longitudinal_current", "node_wavefunction", "node_ode_residual",
]

MODELS = ("PW", "HE", "MS", "Exact")
_SHELL_TOL = 1e-9


def _single_wave(wave):
    if isinstance(wave, PlaneWave):
        return wave
    if isinstance(wave, Background):
        if wave.wave2.xi != 0.0:
            raise ConfigError("the Volkov exponent needs a single plane wave (xi_2 = 0)")
        return wave.wave1
    raise ConfigError("expected a PlaneWave or a single-wave Background")


def _transverse(wave, p):
    return float(dot(p, wave.eps1)), float(dot(p, wave.eps2))


def _wave_linear_integral(wave, p, phi):
    """int_0^phi p.a(phi') dphi' for a circularly polarised wave."""
    c1, c2 = _transverse(wave, p)
    return wave.xi * (c1 * np.sin(phi) + c2 * (1.0 - np.cos(phi)))


def volkov_exponent(wave, p, phi):
    """u(phi) = -int_0^phi [2 p.a + a^2] / (2 k.p) dphi' in closed form."""
    wave = _single_wave(wave)
    p = np.asarray(p, dtype=float)
    kp = float(dot(wave.k, p))
    if kp == 0.0:
        raise ConfigError("k.p = 0: Volkov exponent undefined")
    phi = np.asarray(phi, dtype=float)
    return (wave.xi ** 2 * phi / 2.0 - _wave_linear_integral(wave, p, phi)) / kp


@dataclass(frozen=True)
class KGReduction:
    """Mathieu form of a one-phase Klein-Gordon reduction.

    ``k`` is the effective wavevector (k_bar or k_Delta), ``k2`` its square,
    ``beta = k.p / k^2``, ``y_offset`` the phase subtracted before halving
    (phi0 at the node, 0 otherwise) and ``mean_a2`` = <-a.a> over a cycle.
    """

    case: str
    lam: float
    q: float
    k: np.ndarray
    k2: float
    kp: float
    beta: float
    y_offset: float
    mean_a2: float

    @property
    def spec(self):
        return MathieuSpec(self.lam, self.q)

    def y_of_phase(self, phi):
        return 0.5 * (np.asarray(phi) - self.y_offset)

    @property
    def forbidden(self):
        return self.lam < 0.0


def _check_on_shell(p):
    if abs(float(dot(p, p)) - 1.0) > _SHELL_TOL:
        raise ConfigError("momentum must be on shell (p.p = 1)")


def kg_reduce(bg, p, case):
    """Reduce the Klein-Gordon equation to Mathieu form for ``case`` in {"node", "delta"}."""
    p = np.asarray(p, dtype=float).reshape(4)
    _check_on_shell(p)
    if case == "node":
        w1, w2 = bg.waves
        if w1.xi != w2.xi or w1.omega != w2.omega:
            raise ConfigError("node reduction needs xi_1 = xi_2 and omega_1 = omega_2")
        if abs(p[3]) > 1e-12:
            raise ConfigError("node reduction needs p_z = 0")
        k = bg.k_bar
        xs = bg.xi_sigma
        c1, c2 = _transverse(w1, p)
        perp = math.hypot(c1, c2)
        k2 = float(dot(k, k))
        kp = float(dot(k, p))
        lam = 4.0 * (kp * kp + xs * xs * k2) / (k2 * k2)
        q = 4.0 * xs * perp / k2
        return KGReduction("node", lam, q, k, k2, kp, kp / k2, math.atan2(c2, c1), xs * xs)
    if case == "delta":
        if abs(p[1]) > 1e-12 or abs(p[2]) > 1e-12:
            raise ConfigError("zero-transverse reduction needs p_perp = 0")
        k = bg.k_delta
        k2 = float(dot(k, k))
        if k2 == 0.0:
            raise ConfigError("k_Delta^2 = 0: no zero-transverse reduction")
        kp = float(dot(k, p))
        x1, x2 = bg.wave1.xi, bg.wave2.xi
        lam = 4.0 * (kp * kp + (x1 * x1 + x2 * x2) * k2) / (k2 * k2)
        q = -4.0 * x1 * x2 / k2
        return KGReduction("delta", lam, q, k, k2, kp, kp / k2, 0.0, x1 * x1 + x2 * x2)
    raise ConfigError(f"unknown case {case!r}; expected 'node' or 'delta'")


def forbidden_thresholds(bg, p):
    """Classical and quantum forbidden-region tests for zero transverse momentum.

    The classical test uses the peak value xi_Sigma^2 of -a.a, the quantum
    one (lam_Delta < 0) its cycle average xi_1^2 + xi_2^2, so they differ.
    """
    red = kg_reduce(bg, p, "delta")
    varpi2 = red.kp ** 2 + red.k2 * bg.xi_sigma ** 2
    return {"varpi2": varpi2, "classical_forbidden": varpi2 < 0.0,
            "lam": red.lam, "quantum_forbidden": red.lam < 0.0}


def high_energy_phase(bg, p, x, case="delta"):
    """Phase p.x + arg(F G H) of the high-energy (first-derivative) approximation.

    ``case="delta"`` uses the product ansatz in phi_1, phi_2, phi_Delta;
    ``case="node"`` the Volkov exponent with k replaced by k_bar.
    """
    p = np.asarray(p, dtype=float)
    x = np.asarray(x, dtype=float)
    base = dot(p, x)
    if case == "node":
        kb = bg.k_bar
        kp = float(dot(kb, p))
        if kp == 0.0:
            raise ConfigError("k_bar.p = 0: high-energy phase undefined")
        phi = dot(kb, x)
        xs = bg.xi_sigma
        w = bg.wave1
        c1, c2 = _transverse(w, p)
        lin = xs * (c1 * np.sin(phi) + c2 * (1.0 - np.cos(phi)))
        return base + (xs * xs * phi / 2.0 - lin) / kp
    if case != "delta":
        raise ConfigError(f"unknown case {case!r}")
    total = base
    for w in bg.waves:
        kp = float(dot(w.k, p))
        if w.xi != 0.0:
            c1, c2 = _transverse(w, p)
            if c1 != 0.0 or c2 != 0.0:
                if kp == 0.0:
                    raise ConfigError("k_l.p = 0: high-energy phase undefined")
                total = total - _wave_linear_integral(w, p, w.phase(x)) / kp
    kdp = float(dot(bg.k_delta, p))
    if kdp == 0.0:
        raise ConfigError("k_Delta.p = 0: high-energy phase undefined")
    x1, x2 = bg.wave1.xi, bg.wave2.xi
    phi_d = bg.wave1.phase(x) - bg.wave2.phase(x)
    # -int_0^phi_D a.a dphi = (xi1^2 + xi2^2) phi_D + 2 xi1 xi2 sin(phi_D)
    return total + ((x1 * x1 + x2 * x2) * phi_d + 2.0 * x1 * x2 * np.sin(phi_d)) / (2.0 * kdp)


def node_high_energy_ratio(bg, p):
    """(k_bar.p)^2 / max over phase of -k_bar^2 (a.a + 2 a.p).

    The maximum sits where a.p is most negative, giving
    k_bar^2 (xi_Sigma^2 + 2 xi_Sigma |p_perp|). Large values mean the naive
    high-energy condition holds.
    """
    red = kg_reduce(bg, p, "node")
    xs = bg.xi_sigma
    perp = red.q * red.k2 / (4.0 * xs) if xs else 0.0
    denom = red.k2 * (xs * xs + 2.0 * xs * perp)
    return math.inf if denom == 0.0 else red.kp ** 2 / denom


def _classical_coefficients(red, bg):
    """(varpi^2, mu^2, sign) of the classical phase velocity for this reduction."""
    if red.case == "node":
        # -mu^2 sin^2 form measured from the potential minimum phi0 + pi.
        perp = red.q * red.k2 / (4.0 * bg.xi_sigma) if bg.xi_sigma else 0.0
        varpi2 = red.kp ** 2 + red.k2 * (bg.xi_sigma ** 2 + 2.0 * bg.xi_sigma * perp)
        mu2 = 4.0 * red.k2 * bg.xi_sigma * perp
        return varpi2, mu2, 1.0
    varpi2 = red.kp ** 2 + red.k2 * bg.xi_sigma ** 2
    mu2 = -4.0 * red.k2 * bg.wave1.xi * bg.wave2.xi
    return varpi2, mu2, math.copysign(1.0, red.kp) if red.kp else 1.0


def _ms_parts(red, bg):
    varpi2, mu2, sign = _classical_coefficients(red, bg)
    if varpi2 <= 0.0:
        raise ForbiddenRegimeError(
            f"forbidden region: varpi^2 = {varpi2:.6g} has no real multiple-scale phase")
    if red.case == "node":
        return math.sqrt(varpi2), mu2 / varpi2, sign, red.y_offset + math.pi
    return math.sqrt(varpi2), -mu2 / varpi2, sign, 0.0


def multiscale_phase(red, bg, phi):
    """Multiple-scale exponent u_ms(phi), with u_ms(0) = 0.

    u_ms = -beta phi + (sign / k^2) int_0^phi phidot_cl, where phidot_cl is the
    classical phase velocity; the integral is 2 varpi [E((phi - c)/2 | m) -
    E(-c/2 | m)] with c the phase of the potential minimum. The result
    vanishes identically in zero field.
    """
    varpi, m, sign, centre = _ms_parts(red, bg)
    phi = np.asarray(phi, dtype=float)
    integral = 2.0 * varpi * (elliptic_e(0.5 * (phi - centre), m) - elliptic_e(-0.5 * centre, m))
    return -red.beta * phi + sign * integral / red.k2


def multiscale_rate(red, bg, phi):
    """d u_ms / d phi = -beta + sign * phidot_cl(phi) / k^2."""
    varpi, m, sign, centre = _ms_parts(red, bg)
    s2 = np.sin(0.5 * (np.asarray(phi, dtype=float) - centre)) ** 2
    return -red.beta + sign * varpi * np.sqrt(1.0 - m * s2) / red.k2


def multiscale_amplitude(red, bg, phi_delta, order="full"):
    """Amplitude (1 - k_D^2 a.a / (k_D.p)^2)^(-1/4) of the zero-transverse state.

    ``order="truncated"`` returns the expansion 1 + k_D^2 a.a / (4 (k_D.p)^2)
    instead. Both reject phases where the bracket is not positive.
    """
    if red.case != "delta":
        raise ConfigError("the multiple-scale amplitude is defined for the zero-transverse case")
    if red.kp == 0.0:
        raise ForbiddenRegimeError("k_Delta.p = 0: amplitude undefined")
    phi = np.asarray(phi_delta, dtype=float)
    x1, x2 = bg.wave1.xi, bg.wave2.xi
    a2 = -((x1 + x2) ** 2 - 4.0 * x1 * x2 * np.sin(0.5 * phi) ** 2)
    ratio = red.k2 * a2 / red.kp ** 2
    root = 1.0 - ratio
    if np.any(root <= 0.0):
        raise ForbiddenRegimeError("forbidden region: amplitude bracket is not positive")
    if order == "full":
        return root ** -0.25
    if order == "truncated":
        return 1.0 + 0.25 * ratio
    raise ConfigError(f"unknown order {order!r}")


@dataclass(frozen=True)
class QuasiMomentum:
    """Quasi-momentum q and effective mass squared q.q for one model.

    For the exact model in a gap, ``nu`` is complex and so are ``q`` and
    ``m_star2``; ``is_band`` is False there.
    """

    model: str
    q: np.ndarray
    m_star2: complex
    is_band: bool = True
    nu: complex = None

    @property
    def multiplier(self):
        return None if self.nu is None else np.exp(1j * math.pi * self.nu)


def _complex_dot(u, v):
    return u[0] * v[0] - u[1] * v[1] - u[2] * v[2] - u[3] * v[3]


def quasimomentum(bg, p, case, model, *, nu=None, rtol=1e-12):
    """Quasi-momentum for ``model`` in {"PW", "HE", "MS", "Exact"}.

    PW:    q = p + xi_Sigma^2 / (2 k_1.p) k_1
    HE:    q = p + <-a.a> / (2 k.p) k
    MS:    q = p + (-beta + nu_ms / 2) k, with nu_ms / 2 the cycle average of
           the classical phase velocity divided by k^2
    Exact: q = p - (beta - sign(beta) nu / 2) k with nu the Mathieu exponent.

    ``nu`` may be passed to reuse an already computed FloquetExponent.
    """
    p = np.asarray(p, dtype=float).reshape(4)
    if model not in MODELS:
        raise ConfigError(f"unknown model {model!r}; expected one of {MODELS}")
    if model == "PW":
        k1 = bg.k1
        kp = float(dot(k1, p))
        q = p + bg.xi_sigma ** 2 / (2.0 * kp) * k1
        return QuasiMomentum(model, q, float(dot(q, q)))
    red = kg_reduce(bg, p, case)
    k = red.k
    if model == "HE":
        q = p + red.mean_a2 / (2.0 * red.kp) * k
        return QuasiMomentum(model, q, float(dot(q, q)))
    if model == "MS":
        varpi, m, sign, _ = _ms_parts(red, bg)
        half_nu = sign * 2.0 / math.pi * varpi * ellipe(m) / red.k2
        q = p + (-red.beta + half_nu) * k
        return QuasiMomentum(model, q, float(dot(q, q)))
    fe = mathieu_nu(red.spec, rtol=rtol) if nu is None else nu
    sign = math.copysign(1.0, red.beta) if red.beta else 1.0
    nu_c = fe.nu if hasattr(fe, "nu") else complex(fe)
    coeff = red.beta - sign * nu_c / 2.0
    is_band = bool(getattr(fe, "is_band", nu_c.imag == 0.0))
    if is_band:
        q = p - coeff.real * k
        m2 = 1.0 + red.k2 * (nu_c.real ** 2 / 4.0 - red.beta ** 2)
        return QuasiMomentum(model, q, m2, True, complex(nu_c.real, 0.0))
    q = p.astype(complex) - coeff * k
    m2 = 1.0 + red.k2 * (nu_c ** 2 / 4.0 - red.beta ** 2)
    return QuasiMomentum(model, q, complex(m2), False, nu_c)


def longitudinal_current(bg, p, w, w1, w2):
    """j^3 = -2i p^3 |w|^2 + k_1^3 (w* w_1 - c.c.) + k_2^3 (w* w_2 - c.c.).

    ``w1`` and ``w2`` are the derivatives of w with respect to phi_1 and
    phi_2, sampled at the same points as ``w``.
    """
    w = np.asarray(w, dtype=complex)
    w1 = np.asarray(w1, dtype=complex)
    w2 = np.asarray(w2, dtype=complex)
    p3 = float(np.asarray(p, dtype=float)[3])
    t1 = np.conj(w) * w1
    t2 = np.conj(w) * w2
    return -2j * p3 * np.abs(w) ** 2 + bg.k1[3] * (t1 - np.conj(t1)) + bg.k2[3] * (t2 - np.conj(t2))


def node_wavefunction(red, phi_bar, init=(1.0, 0.0), tol=1e-11):
    """Node wavefunction w(phi_bar) = F(y) exp(-i beta phi_bar) from the Mathieu solution.

    Returns ``(w, dw)`` with dw = dw/dphi_bar; F starts from ``init`` at the
    smallest requested phase.
    """
    if red.case != "node":
        raise ConfigError("node_wavefunction needs a node reduction")
    phi = np.asarray(phi_bar, dtype=float)
    y = red.y_of_phase(phi)
    y0, y1 = float(y.min()), float(y.max())
    if y1 <= y0:
        y1 = y0 + 1e-12
    sol = solve_mathieu(red.spec, y0, y1, init, tol=tol)
    f, fy = sol(y)
    phase = np.exp(-1j * red.beta * phi)
    w = f * phase
    dw = (0.5 * fy - 1j * red.beta * f) * phase
    return w, dw


def node_ode_residual(red, bg, p, phi_bar, w, dw, d2w):
    """Residual of k_bar^2 w'' + 2i (k_bar.p) w' - (2 p.a + a.a) w at the node."""
    p = np.asarray(p, dtype=float)
    phi = np.asarray(phi_bar, dtype=float)
    xs = bg.xi_sigma
    w1 = bg.wave1
    c1, c2 = _transverse(w1, p)
    pa = xs * (c1 * np.cos(phi) + c2 * np.sin(phi))
    return red.k2 * d2w + 2j * red.kp * dw - (2.0 * pa - xs * xs) * w
