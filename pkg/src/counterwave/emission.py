"""Harmonic spectrum of photon emission by a scalar charge in a circularly
polarised plane wave, and the recoil diagnostic for magnetic-node states.

Per unit phase, harmonic s contributes

    W_s = alpha / (4 k.p) int_0^{u_s} du / (1 + u)^2
          [-4 J_s(z)^2 (1 + xi^2) + 2 xi^2 (J_{s+1}(z)^2 + J_{s-1}(z)^2)]

with u_s = 2 s k.p / (1 + xi^2) and
z = 2 s xi / sqrt(1 + xi^2) * sqrt((u/u_s)(1 - u/u_s)).
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy import integrate

from .errors import ConfigError, NonConvergenceError
from .specfun import bessel_j

__all__ = [
    "ALPHA", "EmissionConfig", "HarmonicSpectrum", "bessel_argument", "harmonic_limit",
    "harmonic_integrand", "harmonic_probability", "spectrum", "NodeStability",
    "node_emission_stability",
]

ALPHA = 1.0 / 137.035999084
# QUADPACK refuses relative tolerances below 50 machine epsilons
_MIN_QUAD_TOL = 50.0 * np.finfo(float).eps


@dataclass(frozen=True)
class EmissionConfig:
    """Parameters of the harmonic sum.

    ``quad_tol`` is the relative quadrature tolerance and the early-stop
    threshold; ``tail_tol`` bounds the estimated remainder relative to the
    total for the spectrum to count as converged.
    """

    xi: float
    kp: float
    s_max: int = 50
    alpha: float = ALPHA
    quad_tol: float = 1e-10
    tail_tol: float = 1e-8

    def __post_init__(self):
        if not (math.isfinite(self.xi) and self.xi >= 0.0):
            raise ConfigError("xi must be finite and >= 0")
        if not (math.isfinite(self.kp) and self.kp > 0.0):
            raise ConfigError("k.p must be finite and > 0")
        if int(self.s_max) != self.s_max or self.s_max < 1:
            raise ConfigError("s_max must be an integer >= 1")
        if not (self.tail_tol > 0.0 and self.alpha > 0.0):
            raise ConfigError("alpha and tail_tol must be positive")
        if not self.quad_tol >= _MIN_QUAD_TOL:
            raise ConfigError(f"quad_tol must be >= {_MIN_QUAD_TOL:g}")


def harmonic_limit(cfg, s):
    """Upper light-front limit u_s = 2 s k.p / (1 + xi^2)."""
    return 2.0 * s * cfg.kp / (1.0 + cfg.xi ** 2)


def bessel_argument(s, xi, u, u_s):
    """z = (2 s xi / sqrt(1 + xi^2)) sqrt((u/u_s)(1 - u/u_s)) for 0 <= u <= u_s."""
    u = np.asarray(u, dtype=float)
    if u_s <= 0.0 or np.any(u < 0.0) or np.any(u > u_s):
        raise ConfigError("bessel_argument needs 0 <= u <= u_s")
    t = u / u_s
    return 2.0 * s * xi / math.sqrt(1.0 + xi * xi) * np.sqrt(t * (1.0 - t))


def harmonic_integrand(cfg, s, t):
    """Integrand of W_s in t = u / u_s, including the Jacobian u_s and prefactor."""
    t = np.asarray(t, dtype=float)
    xi = cfg.xi
    u_s = harmonic_limit(cfg, s)
    z = 2.0 * s * xi / math.sqrt(1.0 + xi * xi) * np.sqrt(t * (1.0 - t))
    js = bessel_j(s, z)
    bracket = -4.0 * js * js * (1.0 + xi * xi) + 2.0 * xi * xi * (
        bessel_j(s + 1, z) ** 2 + bessel_j(s - 1, z) ** 2)
    u = u_s * t
    return cfg.alpha / (4.0 * cfg.kp) * u_s * bracket / (1.0 + u) ** 2


def harmonic_probability(cfg, s, scheme="adaptive", order=None):
    """W_s for harmonic ``s``.

    Parameters
    ----------
    scheme : {"adaptive", "gauss"}
        Adaptive Gauss-Kronrod (QUADPACK) to ``cfg.quad_tol``, or a fixed
        high-order Gauss-Legendre rule of ``order`` points.

    Raises
    ------
    NonConvergenceError
        If the adaptive quadrature reports failure.
    """
    if int(s) != s or s < 1:
        raise ConfigError("harmonic index must be an integer >= 1")
    s = int(s)
    if cfg.xi == 0.0:
        return 0.0
    if scheme == "adaptive":
        out = integrate.quad(lambda t: float(harmonic_integrand(cfg, s, t)), 0.0, 1.0,
                             epsabs=0.0, epsrel=cfg.quad_tol, limit=200, full_output=1)
        val, err = out[0], out[1]
        # QUADPACK appends a warning message only when ier > 0
        if len(out) > 3 or err > max(10.0 * cfg.quad_tol * abs(val), 1e-300):
            raise NonConvergenceError(
                f"quadrature for harmonic {s} did not reach tolerance (error {err:.3g})")
        return float(val)
    if scheme == "gauss":
        n = order or (96 + 8 * s)
        x, w = np.polynomial.legendre.leggauss(n)
        t = 0.5 * (x + 1.0)
        return float(0.5 * np.dot(w, harmonic_integrand(cfg, s, t)))
    raise ConfigError(f"unknown quadrature scheme {scheme!r}")


@dataclass(frozen=True)
class HarmonicSpectrum:
    """Per-harmonic probabilities with convergence metadata.

    ``tail`` is a geometric estimate of the sum over harmonics not computed;
    ``converged`` is True when tail <= tail_tol * total.
    """

    entries: list = field(default_factory=list)
    total: float = 0.0
    tail: float = 0.0
    converged: bool = True
    stopped_early: bool = False

    def cumulative(self):
        return np.cumsum([w for _, w in self.entries]) if self.entries else np.zeros(0)


def _geometric_tail(values):
    if len(values) < 2 or values[-1] == 0.0:
        return 0.0
    last = values[-4:]
    ratios = [b / a for a, b in zip(last[:-1], last[1:]) if a > 0.0]
    if not ratios:
        return math.inf
    r = max(ratios)
    return values[-1] * r / (1.0 - r) if r < 1.0 else math.inf


def spectrum(cfg, scheme="adaptive"):
    """W_s for s = 1, 2, ... up to ``cfg.s_max``.

    Stops early once three consecutive W_s fall below quad_tol * total.
    """
    if cfg.xi == 0.0:
        return HarmonicSpectrum([(s, 0.0) for s in range(1, int(cfg.s_max) + 1)], 0.0, 0.0, True)
    entries = []
    values = []
    total = 0.0
    small_run = 0
    stopped = False
    for s in range(1, int(cfg.s_max) + 1):
        w = harmonic_probability(cfg, s, scheme)
        entries.append((s, w))
        values.append(w)
        total += w
        small_run = small_run + 1 if w < cfg.quad_tol * total else 0
        if small_run >= 3:
            stopped = True
            break
    tail = _geometric_tail(values)
    return HarmonicSpectrum(entries, total, tail, tail <= cfg.tail_tol * total, stopped)


@dataclass(frozen=True)
class NodeStability:
    """Longitudinal recoil of the outgoing node state and the verdict."""

    recoil: float
    unstable: bool


def node_emission_stability(l_parallel):
    """Recoil q'_par = -l'_par; the state leaves the node whenever it is nonzero."""
    l_parallel = float(l_parallel)
    recoil = -l_parallel
    return NodeStability(recoil + 0.0, recoil != 0.0)
