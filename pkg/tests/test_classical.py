import math

import numpy as np
import pytest
from conftest import node_pi, on_shell_z
from oracles import (conservation_drifts, delta_shell_rate_squared, five_point_derivative,
                     node_shell_rate_squared, random_case)

from counterwave import classical as cl
from counterwave import relkin
from counterwave.errors import ConfigError, ForbiddenRegimeError

PHI_START = math.pi / 4
NODE_FRACTIONS = {"thin": (-1.0, -1.0), "dashed": (1.0, 0.2), "thick": (0.0, 0.0)}
TAU = np.linspace(0.0, 50.0, 1000)


def node_setup(name):
    bg = relkin.Background.head_on(10.0, 10.0, 0.01)
    return bg, node_pi(bg, PHI_START, *NODE_FRACTIONS[name])


@pytest.mark.parametrize("name", list(NODE_FRACTIONS))
def test_node_phase_matches_lorentz_oracle(name):
    bg, pi = node_setup(name)
    orbit = cl.magnetic_node_orbit(bg, pi)
    init = cl.magnetic_node_initial_state(bg, pi, PHI_START)
    traj = cl.integrate_lorentz(bg, init, 50.0, tol=1e-12, tau_eval=TAU)
    err = np.abs(cl.magnetic_node_phase(orbit, TAU, PHI_START) - cl.oracle_phase(bg, traj, "node"))
    assert err.max() < 1e-8


@pytest.mark.parametrize("name", ["dashed", "thick"])
def test_node_coefficient_two_is_rejected_by_oracle(name):
    bg, pi = node_setup(name)
    orbit = cl.magnetic_node_orbit(bg, pi, coefficient=2.0)
    init = cl.magnetic_node_initial_state(bg, pi, PHI_START)
    traj = cl.integrate_lorentz(bg, init, 50.0, tol=1e-12, tau_eval=TAU)
    err = np.abs(cl.magnetic_node_phase(orbit, TAU, PHI_START) - cl.oracle_phase(bg, traj, "node"))
    assert err.max() > 1e-2


@pytest.mark.parametrize("coefficient,ok", [(4.0, True), (2.0, False)])
@pytest.mark.parametrize("name", ["dashed", "thick"])
def test_node_phase_ode_residual(name, coefficient, ok):
    bg, pi = node_setup(name)
    orbit = cl.magnetic_node_orbit(bg, pi, coefficient=coefficient)
    phase = lambda t: cl.magnetic_node_phase(orbit, t, PHI_START)
    rate = five_point_derivative(phase, TAU)
    residual = np.abs(rate ** 2 - node_shell_rate_squared(bg, pi, phase(TAU)))
    assert (residual.max() < 1e-8) == ok


def test_node_rate_matches_derivative():
    bg, pi = node_setup("dashed")
    orbit = cl.magnetic_node_orbit(bg, pi)
    phase = lambda t: cl.magnetic_node_phase(orbit, t, PHI_START)
    assert np.allclose(five_point_derivative(phase, TAU), cl.magnetic_node_rate(orbit, phase(TAU)),
                       atol=1e-10)


def test_node_phase_starts_at_requested_phase_and_increases():
    bg, pi = node_setup("thick")
    orbit = cl.magnetic_node_orbit(bg, pi)
    phase = cl.magnetic_node_phase(orbit, TAU, PHI_START)
    assert phase[0] == pytest.approx(PHI_START, abs=1e-13)
    assert np.all(np.diff(phase) > 0.0)


def test_node_phase_nearly_stalls_as_s_approaches_one():
    bg, pi = node_setup("thick")
    orbit = cl.magnetic_node_orbit(bg, pi)
    phi = np.linspace(orbit.phi0, orbit.phi0 + 2 * math.pi, 2001)
    rates = cl.magnetic_node_rate(orbit, phi)
    assert rates.min() / rates.max() == pytest.approx(math.sqrt(1.0 - orbit.s), rel=1e-6)


def test_node_s_values():
    values = {}
    for name in NODE_FRACTIONS:
        bg, pi = node_setup(name)
        values[name] = cl.magnetic_node_orbit(bg, pi).s
    assert values["thin"] == 0.0
    # s = 4 xi |Pi| / (1 + (xi + |Pi|)^2) for Pi_0 k_bar = omega p0
    assert values["thick"] == pytest.approx(1600.0 / 1601.0, rel=1e-12)
    perp = 20.0 * math.sqrt(4.0 * 0.5 + 1.44 * 0.5)
    assert values["dashed"] == pytest.approx(80.0 * perp / (1.0 + (20.0 + perp) ** 2), rel=1e-12)


def test_thin_orbit_is_a_circle():
    bg, pi = node_setup("thin")
    traj = cl.reconstruct_trajectory(bg, "node", TAU, pi_in=pi, phi_start=PHI_START)
    x, y = traj.x[:, 1], traj.x[:, 2]
    # algebraic circle fit: x^2 + y^2 = 2 cx x + 2 cy y + c
    design = np.column_stack([2 * x, 2 * y, np.ones_like(x)])
    cx, cy, _ = np.linalg.lstsq(design, x * x + y * y, rcond=None)[0]
    r = np.hypot(x - cx, y - cy)
    assert np.ptp(r) < 1e-8 * r.mean()


@pytest.mark.parametrize("name", list(NODE_FRACTIONS))
def test_node_reconstruction_matches_oracle(name):
    bg, pi = node_setup(name)
    init = cl.magnetic_node_initial_state(bg, pi, PHI_START)
    tau = np.linspace(0.0, 50.0, 201)
    traj = cl.integrate_lorentz(bg, init, 50.0, tol=1e-12, tau_eval=tau)
    rec = cl.reconstruct_trajectory(bg, "node", tau, pi_in=pi, phi_start=PHI_START)
    assert np.allclose(rec.x, traj.x, atol=1e-6)
    assert np.allclose(rec.p, traj.p, atol=1e-8)
    assert np.allclose(relkin.dot(rec.p, rec.p), 1.0, atol=1e-10)


# --------------------------------------------------------------------------
# Zero transverse canonical momentum


DELTA_CASES = {"left": (10.0, 10.0), "right": (0.01, 10.0)}


def delta_setup(name):
    bg = relkin.Background.head_on(*DELTA_CASES[name], 0.01)
    return bg, on_shell_z(20.0005)


def test_fig2_left_orbit_values():
    bg, p_in = delta_setup("left")
    orbit = cl.delta_orbit(bg, p_in)
    assert orbit.allowed
    assert orbit.k_delta_p == pytest.approx(-0.40001, rel=1e-12)
    assert orbit.varpi2 == pytest.approx(0.40001 ** 2 - 0.16, rel=1e-9)
    assert orbit.mu2 == pytest.approx(0.16, rel=1e-12)
    # |mu / varpi| is far above one, yet the phase stays real and finite
    assert math.sqrt(orbit.mu2 / orbit.varpi2) > 100.0
    phi_d, _ = cl.delta_phases(orbit, bg, p_in, TAU)
    assert np.all(np.isfinite(phi_d))


@pytest.mark.parametrize("name", list(DELTA_CASES))
def test_delta_phase_matches_lorentz_oracle(name):
    bg, p_in = delta_setup(name)
    orbit = cl.delta_orbit(bg, p_in)
    traj = cl.integrate_lorentz(bg, cl.delta_initial_state(bg, p_in, orbit), 50.0, tol=1e-12,
                                tau_eval=TAU)
    phi_d, phi_s = cl.delta_phases(orbit, bg, p_in, TAU)
    assert np.abs(phi_d - cl.oracle_phase(bg, traj, "delta")).max() < 1e-8
    assert np.abs(phi_s - relkin.dot(bg.k_sigma, traj.x)).max() < 1e-8


@pytest.mark.parametrize("name", list(DELTA_CASES))
def test_delta_phase_ode_residual(name):
    bg, p_in = delta_setup(name)
    orbit = cl.delta_orbit(bg, p_in)
    phase = lambda t: cl.delta_phases(orbit, bg, p_in, t)[0]
    rate = five_point_derivative(phase, TAU)
    residual = np.abs(rate ** 2 - delta_shell_rate_squared(bg, p_in, phase(TAU)))
    assert residual.max() < 1e-8
    assert np.allclose(rate, cl.delta_rate(orbit, phase(TAU)), atol=1e-9)


@pytest.mark.parametrize("name", list(DELTA_CASES))
def test_delta_reconstruction_matches_oracle(name):
    bg, p_in = delta_setup(name)
    tau = np.linspace(0.0, 50.0, 201)
    traj = cl.integrate_lorentz(bg, cl.delta_initial_state(bg, p_in), 50.0, tol=1e-12, tau_eval=tau)
    rec = cl.reconstruct_trajectory(bg, "delta", tau, p_in=p_in)
    assert np.allclose(rec.x, traj.x, atol=1e-6)
    assert np.allclose(rec.p, traj.p, atol=1e-7)


def test_delta_initial_state_has_zero_transverse_canonical_momentum():
    bg, p_in = delta_setup("right")
    state = cl.delta_initial_state(bg, p_in)
    pi = cl.canonical_momentum(bg, state.x, state.p)
    assert np.allclose(pi[1:3], 0.0, atol=1e-14)
    assert relkin.dot(state.p, state.p) == pytest.approx(1.0, abs=1e-12)


def test_forbidden_delta_request_raises():
    bg = relkin.Background.head_on(10.0, 10.0, 0.01)
    orbit = cl.delta_orbit(bg, on_shell_z(0.1))
    assert orbit.regime == "forbidden" and orbit.peak_forbidden
    with pytest.raises(ForbiddenRegimeError):
        cl.delta_phases(orbit, bg, on_shell_z(0.1), TAU)
    with pytest.raises(ForbiddenRegimeError):
        orbit.varpi


def test_rest_state_is_fixed_point():
    bg = relkin.Background.head_on(10.0, 10.0, 0.01)
    p_in = np.array([1.0, 0.0, 0.0, 0.0])
    assert cl.is_rest_state(bg, p_in)
    assert cl.delta_orbit(bg, p_in).regime == "forbidden"
    traj = cl.reconstruct_trajectory(bg, "delta", TAU, p_in=p_in)
    assert np.allclose(traj.p, [1.0, 0.0, 0.0, 0.0])
    assert np.allclose(traj.x[:, 1:], 0.0)
    assert not cl.is_rest_state(relkin.Background.head_on(10.0, 9.0, 0.01), p_in)


# --------------------------------------------------------------------------
# Conservation laws and validation


def test_conservation_along_random_trajectories(rng):
    for _ in range(3):
        bg, init = random_case(rng)
        traj = cl.integrate_lorentz(bg, init, 20.0, tol=1e-12, tau_eval=np.linspace(0, 20, 400))
        assert max(conservation_drifts(bg, traj)) < 1e-8


def test_lorentz_rhs_preserves_mass_shell(rng):
    bg, init = random_case(rng)
    dp = cl.lorentz_rhs(bg, init.x, init.p)
    assert relkin.dot(init.p, dp) == pytest.approx(0.0, abs=1e-12)


def test_node_requires_equal_waves_and_transverse_momentum():
    with pytest.raises(ConfigError):
        cl.magnetic_node_orbit(relkin.Background.head_on(1.0, 2.0, 0.1), np.zeros(4))
    with pytest.raises(ConfigError):
        cl.magnetic_node_orbit(relkin.Background.head_on(1.0, 1.0, 0.1, 0.2), np.zeros(4))
    with pytest.raises(ConfigError):
        cl.magnetic_node_orbit(relkin.Background.head_on(1.0, 1.0, 0.1), [0.0, 1.0, 0.0, 0.5])


def test_delta_requires_zero_transverse_momentum():
    with pytest.raises(ConfigError):
        cl.delta_orbit(relkin.Background.head_on(1.0, 1.0, 0.1), [math.sqrt(2.0), 1.0, 0.0, 0.0])


def test_integrator_rejects_off_shell_state():
    bg = relkin.Background.head_on(1.0, 1.0, 0.1)
    with pytest.raises(ConfigError):
        cl.integrate_lorentz(bg, cl.ParticleState(0.0, np.zeros(4), [2.0, 0.0, 0.0, 0.0]), 1.0)


def test_unknown_case_rejected():
    bg = relkin.Background.head_on(1.0, 1.0, 0.1)
    with pytest.raises(ConfigError):
        cl.reconstruct_trajectory(bg, "oblique", TAU)
