"""Minkowski kinematics and the two-wave background field.

Units: hbar = c = m = 1. The metric signature is (+, -, -, -) and the charge
is absorbed into the potential, a = eA. Arrays of four-vectors use the last
axis for the components (t, x, y, z).

Polarisation convention: both waves share the basis eps1 = (0, 1, 0, 0),
eps2 = (0, 0, 1, 0), and a_l = xi_l (eps1 cos phi_l + eps2 sin phi_l) with
phi_l = k_l . x. For counter-propagating waves along +z and -z this gives
-a.a = xi_Sigma^2 - 4 xi_1 xi_2 sin^2(phi_Delta / 2).
"""
from dataclasses import dataclass
from typing import NamedTuple
import math

import numpy as np

from .errors import ConfigError

__all__ = [
    "METRIC", "dot", "FourVector", "boost_z", "rotate_z", "PlaneWave", "Background",
    "eval_potential", "potential", "potential_derivative", "field_tensor",
    "electric_magnetic", "phase_variables", "Phases", "InvariantSet",
    "relativistic_invariants", "transverse_basis",
]

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])


def dot(u, v):
    """Minkowski product u.v over the last axis."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 0] - u[..., 1] * v[..., 1] - u[..., 2] * v[..., 2] - u[..., 3] * v[..., 3]


@dataclass(frozen=True)
class FourVector:
    """Contravariant four-vector (t, x, y, z)."""

    t: float
    x: float
    y: float
    z: float

    @classmethod
    def of(cls, values):
        t, x, y, z = (float(c) for c in np.asarray(values, dtype=float).reshape(4))
        return cls(t, x, y, z)

    def __array__(self, dtype=None, copy=None):
        return np.array([self.t, self.x, self.y, self.z], dtype=dtype or float)

    def __iter__(self):
        return iter((self.t, self.x, self.y, self.z))

    def __add__(self, other):
        return FourVector.of(np.asarray(self) + np.asarray(other))

    def __sub__(self, other):
        return FourVector.of(np.asarray(self) - np.asarray(other))

    def __neg__(self):
        return FourVector(-self.t, -self.x, -self.y, -self.z)

    def __mul__(self, scalar):
        return FourVector.of(float(scalar) * np.asarray(self))

    __rmul__ = __mul__

    def dot(self, other):
        return float(dot(self, other))

    def square(self):
        return self.dot(self)


def boost_z(v, rapidity):
    """Boost four-vector(s) along z by the given rapidity."""
    v = np.array(v, dtype=float)
    ch, sh = math.cosh(rapidity), math.sinh(rapidity)
    t, z = v[..., 0].copy(), v[..., 3].copy()
    v[..., 0] = ch * t - sh * z
    v[..., 3] = ch * z - sh * t
    return v


def rotate_z(v, angle):
    """Rotate four-vector(s) about the z axis."""
    v = np.array(v, dtype=float)
    c, s = math.cos(angle), math.sin(angle)
    x, y = v[..., 1].copy(), v[..., 2].copy()
    v[..., 1] = c * x - s * y
    v[..., 2] = s * x + c * y
    return v


EPS1 = FourVector(0.0, 1.0, 0.0, 0.0)
EPS2 = FourVector(0.0, 0.0, 1.0, 0.0)


@dataclass(frozen=True)
class PlaneWave:
    """Circularly polarised plane wave a = xi (eps1 cos phi + eps2 sin phi)."""

    xi: float
    omega: float
    direction: tuple = (0.0, 0.0, 1.0)
    eps1: FourVector = EPS1
    eps2: FourVector = EPS2

    def __post_init__(self):
        if not (math.isfinite(self.xi) and self.xi >= 0.0):
            raise ConfigError(f"wave intensity xi must be finite and >= 0, got {self.xi!r}")
        if not (math.isfinite(self.omega) and self.omega > 0.0):
            raise ConfigError(f"wave frequency must be finite and > 0, got {self.omega!r}")
        n = np.asarray(self.direction, dtype=float)
        if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise ConfigError("wave direction must be a unit 3-vector")
        k = self.k
        e1, e2 = np.asarray(self.eps1), np.asarray(self.eps2)
        checks = (dot(k, e1), dot(k, e2), dot(e1, e2), dot(e1, e1) + 1.0, dot(e2, e2) + 1.0)
        if max(abs(c) for c in checks) > 1e-12:
            raise ConfigError("polarisation vectors must be transverse and orthonormal")

    @property
    def k(self):
        n = self.direction
        return np.array([self.omega, self.omega * n[0], self.omega * n[1], self.omega * n[2]])

    def phase(self, x):
        return dot(self.k, x)

    def potential(self, phi):
        phi = np.asarray(phi, dtype=float)[..., None]
        return self.xi * (np.cos(phi) * np.asarray(self.eps1) + np.sin(phi) * np.asarray(self.eps2))

    def potential_derivative(self, phi):
        """d a / d phi."""
        phi = np.asarray(phi, dtype=float)[..., None]
        return self.xi * (-np.sin(phi) * np.asarray(self.eps1) + np.cos(phi) * np.asarray(self.eps2))


@dataclass(frozen=True)
class Background:
    """Two plane waves and the derived wavevectors k_Delta, k_Sigma, k_bar."""

    wave1: PlaneWave
    wave2: PlaneWave

    @classmethod
    def head_on(cls, xi1, xi2, omega1, omega2=None):
        """Wave 1 along +z, wave 2 along -z, shared polarisation basis."""
        omega2 = omega1 if omega2 is None else omega2
        return cls(PlaneWave(float(xi1), float(omega1), (0.0, 0.0, 1.0)),
                   PlaneWave(float(xi2), float(omega2), (0.0, 0.0, -1.0)))

    @property
    def k1(self):
        return self.wave1.k

    @property
    def k2(self):
        return self.wave2.k

    @property
    def k_delta(self):
        return self.k1 - self.k2

    @property
    def k_sigma(self):
        return self.k1 + self.k2

    @property
    def k_bar(self):
        return 0.5 * self.k_sigma

    @property
    def xi_sigma(self):
        return self.wave1.xi + self.wave2.xi

    @property
    def waves(self):
        return (self.wave1, self.wave2)

    def is_head_on(self):
        return abs(float(dot(self.k1, self.k2))) > 0.0


def potential(bg, x):
    """a(x) for an array of positions, shape (..., 4)."""
    x = np.asarray(x, dtype=float)
    return sum(w.potential(w.phase(x)) for w in bg.waves)


def eval_potential(bg, x):
    """a(x) = a_1(phi_1) + a_2(phi_2) as a FourVector."""
    return FourVector.of(potential(bg, x))


def potential_derivative(bg, x):
    """Tuple of d a_l / d phi_l at x for each wave."""
    x = np.asarray(x, dtype=float)
    return tuple(w.potential_derivative(w.phase(x)) for w in bg.waves)


def field_tensor(bg, x):
    """Contravariant field tensor f^{mu nu} = sum_l (k_l^mu a_l'^nu - k_l^nu a_l'^mu)."""
    f = np.zeros(np.shape(x)[:-1] + (4, 4))
    for w, da in zip(bg.waves, potential_derivative(bg, x)):
        outer = w.k[..., :, None] * da[..., None, :]
        f = f + outer - np.swapaxes(outer, -1, -2)
    return f


def electric_magnetic(f):
    """Electric and magnetic 3-vectors from f^{mu nu}: E_i = -f^{0i}, B = -(f^23, f^31, f^12)."""
    f = np.asarray(f)
    e = -f[..., 0, 1:]
    b = -np.stack([f[..., 2, 3], f[..., 3, 1], f[..., 1, 2]], axis=-1)
    return e, b


class Phases(NamedTuple):
    phi1: float
    phi2: float
    phi_delta: float
    phi_sigma: float
    phi_bar: float


def phase_variables(bg, x):
    """Phases phi_l = k_l.x, their difference and sum, and phi_bar = k_bar.x."""
    phi1 = bg.wave1.phase(x)
    phi2 = bg.wave2.phase(x)
    return Phases(phi1, phi2, phi1 - phi2, phi1 + phi2, dot(bg.k_bar, x))


@dataclass(frozen=True)
class InvariantSet:
    """Relativistic invariants at a space-time point.

    ``xi`` is the local intensity sqrt(-a.a), ``eta`` = k_bar.p, ``calF`` =
    (E^2 - B^2)/2 and ``calG`` = E.B (dual tensor built with eps^{0123} = +1).
    ``ratio`` = eta^2 / |calF| and ``valid`` reports ratio > threshold.
    """

    xi: float
    eta: float
    calF: float
    calG: float
    ratio: float
    valid: bool


def relativistic_invariants(bg, p, x, threshold=100.0, shell_tol=1e-9):
    """Evaluate xi, eta, calF, calG at x for an on-shell momentum p."""
    p = np.asarray(p, dtype=float)
    if abs(float(dot(p, p)) - 1.0) > shell_tol:
        raise ConfigError("momentum must be on shell (p.p = 1)")
    x = np.asarray(x, dtype=float)
    a = potential(bg, x)
    e, b = electric_magnetic(field_tensor(bg, x))
    calf = 0.5 * float(e @ e - b @ b)
    calg = float(e @ b)
    eta = float(dot(bg.k_bar, p))
    ratio = math.inf if calf == 0.0 else eta * eta / abs(calf)
    return InvariantSet(math.sqrt(max(0.0, -float(dot(a, a)))), eta, calf, calg, ratio,
                        ratio > threshold)


def transverse_basis(bg):
    """Vectors e_{l,j} orthogonal to both k_1 and k_2, keyed by (l, j)."""
    k1, k2 = bg.k1, bg.k2
    k12 = float(dot(k1, k2))
    if k12 == 0.0:
        raise ConfigError("degenerate geometry: k1.k2 = 0")
    basis = {}
    for l, w in enumerate(bg.waves, start=1):
        for j, eps in enumerate((w.eps1, w.eps2), start=1):
            e = np.asarray(eps)
            basis[(l, j)] = e - dot(e, k2) / k12 * k1 - dot(e, k1) / k12 * k2
    return basis
