"""Lorentz-force dynamics in two counter-propagating circularly polarised waves.

Two cases admit closed-form phases in terms of the Jacobi amplitude:

* motion confined to a magnetic node (xi_1 = xi_2, omega_1 = omega_2, z = 0,
  p_z = 0), where phi_bar = k_bar.x obeys
  (d phi~/d tau)^2 = varpi^2 - mu^2 sin^2(phi~ / 2) with phi~ = phi_bar - phi0;
* zero transverse canonical momentum, where phi_Delta obeys
  (d phi_Delta/d tau)^2 = varpi_D^2 + mu_D^2 sin^2(phi_Delta / 2).

A high-order adaptive integrator of the full Lorentz equation serves as the
independent reference for both.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.integrate import solve_ivp

from . import relkin
from .errors import ConfigError, ForbiddenRegimeError, NonConvergenceError
from .relkin import dot, potential
from .specfun import elliptic_f, jacobi_am

__all__ = [
    "ParticleState", "Trajectory", "integrate_lorentz", "lorentz_rhs",
    "conserved_transverse", "conserved_longitudinal", "canonical_momentum",
    "MagneticNodeOrbit", "magnetic_node_orbit", "magnetic_node_phase",
    "magnetic_node_rate", "magnetic_node_initial_state", "NODE_MU_COEFFICIENT",
    "DeltaOrbit", "delta_orbit", "delta_phases", "delta_rate", "delta_initial_state",
    "is_rest_state", "reconstruct_trajectory", "oracle_phase",
]

# Coefficient c in mu_perp^2 = c k_bar^2 xi_Sigma |Pi_perp|; 4 is the value
# that satisfies the Lorentz equation (see the ODE-residual tests).
NODE_MU_COEFFICIENT = 4.0

_TRANSVERSE_TOL = 1e-12


@dataclass(frozen=True)
class ParticleState:
    """Proper time, position and kinetic momentum of the particle."""

    tau: float
    x: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float).reshape(4))
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float).reshape(4))


@dataclass(frozen=True)
class Trajectory:
    """Sampled trajectory: tau (n,), x (n, 4), p (n, 4)."""

    tau: np.ndarray
    x: np.ndarray
    p: np.ndarray

    def state(self, i):
        return ParticleState(float(self.tau[i]), self.x[i], self.p[i])

    def __len__(self):
        return len(self.tau)


def lorentz_rhs(bg, x, p):
    """dp/d tau = f^{mu nu} p_nu = sum_l [k_l (a_l'.p) - a_l' (k_l.p)]."""
    dp = np.zeros_like(p)
    for w in bg.waves:
        da = w.potential_derivative(w.phase(x))
        dp = dp + w.k * dot(da, p)[..., None] - da * dot(w.k, p)[..., None]
    return dp


def integrate_lorentz(bg, init, tau_end, tol=1e-10, tau_eval=None):
    """Integrate the Lorentz equation from ``init`` to ``tau_end``.

    Parameters
    ----------
    bg : Background
    init : ParticleState
        Must be on shell.
    tau_end : float
        Final proper time.
    tol : float
        Relative tolerance of the 8th-order integrator; the absolute
        tolerance is ``tol * 1e-2``.
    tau_eval : array_like, optional
        Output times; defaults to the integrator's own steps.

    Raises
    ------
    NonConvergenceError
        On integrator failure; ``last_state`` holds the last good state.
    """
    if abs(dot(init.p, init.p) - 1.0) > 1e-9:
        raise ConfigError("initial momentum must be on shell (p.p = 1)")

    def rhs(tau, y):
        return np.concatenate([y[4:], lorentz_rhs(bg, y[:4], y[4:])])

    y0 = np.concatenate([init.x, init.p])
    res = solve_ivp(rhs, (init.tau, tau_end), y0, method="DOP853", rtol=tol,
                    atol=tol * 1e-2, t_eval=tau_eval)
    if res.status != 0:
        last = ParticleState(res.t[-1], res.y[:4, -1], res.y[4:, -1]) if res.t.size else init
        raise NonConvergenceError(f"Lorentz integration failed: {res.message}", last_state=last)
    return Trajectory(res.t, res.y[:4].T.copy(), res.y[4:].T.copy())


def canonical_momentum(bg, x, p):
    """Pi = p + a(x)."""
    return np.asarray(p, dtype=float) + potential(bg, x)


def conserved_transverse(bg, state, l, j):
    """e_{l,j}.Pi, conserved along every trajectory."""
    if l not in (1, 2) or j not in (1, 2):
        raise ConfigError("wave and polarisation indices must be 1 or 2")
    e = relkin.transverse_basis(bg)[(l, j)]
    return dot(e, canonical_momentum(bg, state.x, state.p))


def conserved_longitudinal(bg, state):
    """2 (k1.Pi)(k2.Pi) - (k1.k2) Pi.Pi, conserved along every trajectory."""
    k12 = float(dot(bg.k1, bg.k2))
    if k12 == 0.0:
        raise ConfigError("degenerate geometry: k1.k2 = 0")
    pi = canonical_momentum(bg, state.x, state.p)
    return 2.0 * dot(bg.k1, pi) * dot(bg.k2, pi) - k12 * dot(pi, pi)


# --------------------------------------------------------------------------
# Magnetic node


@dataclass(frozen=True)
class MagneticNodeOrbit:
    """Coefficients of the node phase equation.

    ``s = mu2 / varpi2`` is the Jacobi parameter and ``phi0`` the phase at
    which phi~ = 0 (the potential points against Pi_perp there).
    """

    varpi2: float
    mu2: float
    phi0: float
    s: float
    omega: float
    pi_perp: float
    xi_sigma: float

    @property
    def varpi(self):
        return math.sqrt(self.varpi2)


def _check_node_background(bg):
    w1, w2 = bg.waves
    if w1.xi != w2.xi:
        raise ConfigError("a magnetic node needs xi_1 = xi_2")
    if w1.omega != w2.omega:
        raise ConfigError("a magnetic node needs omega_1 = omega_2")
    if not bg.is_head_on():
        raise ConfigError("degenerate geometry: k1.k2 = 0")


def magnetic_node_orbit(bg, pi_in, coefficient=NODE_MU_COEFFICIENT):
    """Phase-equation coefficients at a magnetic node.

    Parameters
    ----------
    bg : Background
        Head-on waves with xi_1 = xi_2 and omega_1 = omega_2.
    pi_in : array_like
        Canonical momentum Pi = p + a; its z component must vanish.
    coefficient : float
        Factor c in mu^2 = c k_bar^2 xi_Sigma |Pi_perp|. Only the default
        reproduces the Lorentz dynamics; other values exist for comparison.
    """
    _check_node_background(bg)
    pi = np.asarray(pi_in, dtype=float).reshape(4)
    if abs(pi[3]) > _TRANSVERSE_TOL:
        raise ConfigError("node motion needs a purely transverse canonical momentum (Pi_z = 0)")
    kb = bg.k_bar
    kb2 = float(dot(kb, kb))
    e1, e2 = (np.asarray(e) for e in (bg.wave1.eps1, bg.wave1.eps2))
    c1, c2 = float(dot(pi, e1)), float(dot(pi, e2))
    perp = math.hypot(c1, c2)
    xs = bg.xi_sigma
    varpi2 = float(dot(kb, pi)) ** 2 + kb2 * (xs * xs - (float(dot(pi, pi)) - 1.0) + 2.0 * xs * perp)
    mu2 = coefficient * kb2 * xs * perp
    return MagneticNodeOrbit(varpi2, mu2, math.atan2(c2, c1), mu2 / varpi2,
                             float(kb[0]), perp, xs)


def _node_tau_shift(orbit, phi_start):
    if phi_start is None:
        return 0.0
    return 2.0 * float(elliptic_f(0.5 * (phi_start - orbit.phi0), orbit.s)) / orbit.varpi


def magnetic_node_phase(orbit, tau, phi_start=None):
    """phi_bar(tau) = 2 am(varpi (tau + tau_0) / 2 | s) + phi0.

    With ``phi_start`` None, tau is measured from phi~ = 0; otherwise tau_0 is
    chosen so that phi_bar(0) = phi_start.
    """
    if not orbit.s < 1.0:
        raise ForbiddenRegimeError(f"node parameter s = {orbit.s!r} >= 1 has no bounded phase")
    shift = _node_tau_shift(orbit, phi_start)
    u = 0.5 * orbit.varpi * (np.asarray(tau, dtype=float) + shift)
    return 2.0 * jacobi_am(u, orbit.s) + orbit.phi0


def magnetic_node_rate(orbit, phi_bar):
    """d phi_bar / d tau = sqrt(varpi^2 - mu^2 sin^2((phi_bar - phi0)/2))."""
    sin2 = np.sin(0.5 * (np.asarray(phi_bar) - orbit.phi0)) ** 2
    return np.sqrt(orbit.varpi2 - orbit.mu2 * sin2)


def magnetic_node_initial_state(bg, pi_in, phi_start=0.0):
    """On-shell state at z = 0 with phi_bar = phi_start and canonical momentum pi_in."""
    _check_node_background(bg)
    pi = np.asarray(pi_in, dtype=float).reshape(4)
    x = np.array([phi_start / bg.wave1.omega, 0.0, 0.0, 0.0])
    p = pi - potential(bg, x)
    p[3] = 0.0
    p[0] = math.sqrt(1.0 + p[1] ** 2 + p[2] ** 2)
    return ParticleState(0.0, x, p)


# --------------------------------------------------------------------------
# Zero transverse canonical momentum


@dataclass(frozen=True)
class DeltaOrbit:
    """Coefficients of the phi_Delta equation.

    ``varpi2 = (k_D.p)^2 + k_D^2 xi_Sigma^2`` and ``mu2 = -4 k_D^2 xi_1 xi_2``;
    ``regime`` is "forbidden" exactly when varpi2 < 0. ``k_delta_p`` keeps
    the sign used for the square root of varpi2. ``peak_forbidden`` is the
    same test written as (k_D.p)^2 < k_D^2 max(a.a).
    """

    varpi2: float
    mu2: float
    regime: str
    k_delta_p: float
    k_sigma_p: float
    peak_forbidden: bool

    @property
    def allowed(self):
        return self.regime == "allowed"

    @property
    def varpi(self):
        """Signed root of varpi2, following the sign of k_D.p."""
        if not self.allowed:
            raise ForbiddenRegimeError("no real phase velocity in the forbidden region")
        return math.copysign(math.sqrt(self.varpi2), self.k_delta_p if self.k_delta_p else 1.0)

    @property
    def param(self):
        """Jacobi parameter -mu^2 / varpi^2."""
        return -self.mu2 / self.varpi2


def delta_orbit(bg, p_in):
    """Classify and parametrise the zero-transverse-canonical-momentum motion."""
    p = np.asarray(p_in, dtype=float).reshape(4)
    if abs(p[1]) > _TRANSVERSE_TOL or abs(p[2]) > _TRANSVERSE_TOL:
        raise ConfigError("zero-transverse motion needs p_in with vanishing transverse components")
    kd = bg.k_delta
    kd2 = float(dot(kd, kd))
    kdp = float(dot(kd, p))
    xs = bg.xi_sigma
    varpi2 = kdp * kdp + kd2 * xs * xs
    mu2 = -4.0 * kd2 * bg.wave1.xi * bg.wave2.xi
    # Peak of -a.a over phase is xi_Sigma^2, so k_D^2 max(a.a) = -k_D^2 xi_Sigma^2.
    peak_forbidden = kdp * kdp < -kd2 * xs * xs
    regime = "forbidden" if varpi2 < 0.0 else "allowed"
    return DeltaOrbit(varpi2, mu2, regime, kdp, float(dot(bg.k_sigma, p)), peak_forbidden)


def is_rest_state(bg, p_in):
    """Fixed point: equal waves and k_D.p_in = 0, so the particle stays put at a node."""
    w1, w2 = bg.waves
    p = np.asarray(p_in, dtype=float).reshape(4)
    return (w1.xi == w2.xi and w1.omega == w2.omega and abs(p[1]) <= _TRANSVERSE_TOL
            and abs(p[2]) <= _TRANSVERSE_TOL and float(dot(bg.k_delta, p)) == 0.0)


def delta_phases(orbit, bg, p_in, tau):
    """phi_Delta(tau) = 2 am(varpi tau / 2 | -mu^2/varpi^2), phi_Sigma = (k_S.p_in) tau.

    Proper time is measured from phi_Delta = phi_Sigma = 0.
    """
    if not orbit.allowed:
        raise ForbiddenRegimeError(
            f"forbidden region: varpi_Delta^2 = {orbit.varpi2:.6g} < 0 has no real phase")
    if orbit.varpi2 == 0.0:
        raise ForbiddenRegimeError("separatrix varpi_Delta^2 = 0 has no finite phase solution")
    tau = np.asarray(tau, dtype=float)
    varpi = orbit.varpi
    phi_d = 2.0 * jacobi_am(0.5 * varpi * tau, orbit.param)
    phi_s = float(dot(bg.k_sigma, p_in)) * tau
    return phi_d, phi_s


def delta_rate(orbit, phi_delta):
    """Signed d phi_Delta / d tau = sign(k_D.p) sqrt(varpi^2 + mu^2 sin^2(phi_Delta / 2))."""
    sin2 = np.sin(0.5 * np.asarray(phi_delta)) ** 2
    return math.copysign(1.0, orbit.varpi) * np.sqrt(orbit.varpi2 + orbit.mu2 * sin2)


def _solve_light_cone(bg, delta_value, sigma_value):
    """(t, z) components with k_D.v = delta_value and k_S.v = sigma_value."""
    kd, ks = bg.k_delta, bg.k_sigma
    mat = np.array([[kd[0], -kd[3]], [ks[0], -ks[3]]])
    rhs = np.stack(np.broadcast_arrays(delta_value, sigma_value), axis=0)
    sol = np.linalg.solve(mat, rhs.reshape(2, -1))
    return sol[0].reshape(np.shape(rhs)[1:]), sol[1].reshape(np.shape(rhs)[1:])


def delta_initial_state(bg, p_in, orbit=None):
    """State at phi_Delta = phi_Sigma = 0 with zero transverse canonical momentum."""
    orbit = delta_orbit(bg, p_in) if orbit is None else orbit
    x = np.zeros(4)
    p = -potential(bg, x)
    p0, p3 = _solve_light_cone(bg, orbit.varpi, orbit.k_sigma_p)
    p[0], p[3] = float(p0), float(p3)
    return ParticleState(0.0, x, p)


# --------------------------------------------------------------------------
# Trajectory reconstruction from the analytic phases


_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def _cumulative_integral(func, tau_grid, max_interval):
    """Cumulative integral of a vectorised func over tau_grid by composite Gauss-Legendre."""
    tau_grid = np.asarray(tau_grid, dtype=float)
    edges = [tau_grid[0]]
    owner = []
    for i in range(1, len(tau_grid)):
        a, b = tau_grid[i - 1], tau_grid[i]
        n = max(1, int(math.ceil(abs(b - a) / max_interval)))
        sub = np.linspace(a, b, n + 1)[1:]
        edges.extend(sub)
        owner.extend([i] * n)
    edges = np.asarray(edges)
    lo, hi = edges[:-1], edges[1:]
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    nodes = mid[:, None] + half[:, None] * _GL_X[None, :]
    vals = func(nodes.ravel())
    vals = vals.reshape(nodes.shape + vals.shape[1:])
    pieces = np.einsum("k,ik...->i...", _GL_W, vals) * half.reshape((-1,) + (1,) * (vals.ndim - 2))
    out = np.zeros((len(tau_grid),) + pieces.shape[1:])
    owner = np.asarray(owner)
    for i in range(1, len(tau_grid)):
        out[i] = out[i - 1] + pieces[owner == i].sum(axis=0)
    return out


def reconstruct_trajectory(bg, case, tau_grid, *, pi_in=None, phi_start=0.0, p_in=None):
    """Trajectory built from the analytic phase and the conservation laws.

    Parameters
    ----------
    bg : Background
    case : {"node", "delta"}
        Magnetic node (needs ``pi_in`` and ``phi_start``) or zero transverse
        canonical momentum (needs ``p_in``).
    tau_grid : array_like
        Increasing proper times starting at the initial state.

    Returns
    -------
    Trajectory
        Transverse coordinates come from quadrature of p_perp(tau).
    """
    tau_grid = np.asarray(tau_grid, dtype=float)
    if case == "node":
        orbit = magnetic_node_orbit(bg, pi_in)
        pi = np.asarray(pi_in, dtype=float).reshape(4)
        omega = bg.wave1.omega
        start = magnetic_node_initial_state(bg, pi, phi_start)

        def momentum(tau):
            phi = magnetic_node_phase(orbit, tau, phi_start)
            x = np.zeros(np.shape(tau) + (4,))
            x[..., 0] = phi / omega
            p = pi - potential(bg, x)
            p[..., 3] = 0.0
            p[..., 0] = np.sqrt(1.0 + p[..., 1] ** 2 + p[..., 2] ** 2)
            return x, p

        x, p = momentum(tau_grid)
        step = 0.5 / max(orbit.varpi, 1e-300)
        x[:, 1:3] = start.x[1:3] + _cumulative_integral(lambda t: momentum(t)[1][..., 1:3],
                                                        tau_grid, step)
        return Trajectory(tau_grid, x, p)
    if case == "delta":
        if is_rest_state(bg, p_in):
            x = np.zeros((len(tau_grid), 4))
            x[:, 0] = tau_grid
            p = np.zeros((len(tau_grid), 4))
            p[:, 0] = 1.0
            return Trajectory(tau_grid, x, p)
        orbit = delta_orbit(bg, p_in)

        def state(tau):
            phi_d, phi_s = delta_phases(orbit, bg, p_in, tau)
            x = np.zeros(np.shape(tau) + (4,))
            x[..., 0], x[..., 3] = _solve_light_cone(bg, phi_d, phi_s)
            p = -potential(bg, x)
            p[..., 0], p[..., 3] = _solve_light_cone(bg, delta_rate(orbit, phi_d),
                                                     np.full(np.shape(tau), orbit.k_sigma_p))
            return x, p

        x, p = state(tau_grid)
        scale = math.sqrt(abs(orbit.varpi2) + orbit.mu2) + abs(orbit.k_sigma_p)
        x[:, 1:3] = _cumulative_integral(lambda t: state(t)[1][..., 1:3], tau_grid, 0.5 / scale)
        return Trajectory(tau_grid, x, p)
    raise ConfigError(f"unknown case {case!r}; expected 'node' or 'delta'")


def oracle_phase(bg, traj, case):
    """Phase read off a numerical trajectory: phi_bar for "node", phi_Delta for "delta"."""
    if case == "node":
        return dot(bg.k_bar, traj.x)
    if case == "delta":
        return dot(bg.k_delta, traj.x)
    raise ConfigError(f"unknown case {case!r}")
