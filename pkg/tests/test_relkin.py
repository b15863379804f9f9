import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from counterwave import relkin
from counterwave.errors import ConfigError

finite = st.floats(-50.0, 50.0)
vec4 = st.tuples(finite, finite, finite, finite).map(np.array)


def fd_field_tensor(bg, x, h=1e-5):
    """f^{mu nu} = d^mu a^nu - d^nu a^mu by central differences, d^mu = g^{mu mu} d_mu."""
    grad = np.zeros((4, 4))
    for mu in range(4):
        e = np.zeros(4)
        e[mu] = h
        grad[mu] = (relkin.potential(bg, x + e) - relkin.potential(bg, x - e)) / (2 * h)
    upper = relkin.METRIC @ grad
    return upper - upper.T


@pytest.mark.parametrize("xi1,xi2,w1,w2", [(1.0, 2.0, 0.7, 1.3), (10.0, 10.0, 0.01, 0.01), (0.3, 0.0, 2.0, 1.0)])
def test_field_tensor_matches_finite_differences(xi1, xi2, w1, w2):
    bg = relkin.Background.head_on(xi1, xi2, w1, w2)
    for x in (np.array([0.3, -1.0, 2.0, 0.7]), np.array([5.0, 0.0, 0.0, -3.0])):
        f = relkin.field_tensor(bg, x)
        scale = max(1.0, np.abs(f).max())
        assert np.allclose(f, fd_field_tensor(bg, x), atol=1e-8 * scale)
        assert np.allclose(f, -f.T)


def test_minkowski_product_signature():
    assert relkin.dot([1, 0, 0, 0], [1, 0, 0, 0]) == 1.0
    assert relkin.dot([0, 1, 0, 0], [0, 1, 0, 0]) == -1.0
    assert np.allclose(relkin.METRIC, np.diag([1, -1, -1, -1]))


@settings(max_examples=50, deadline=None)
@given(u=vec4, v=vec4, eta=st.floats(-3.0, 3.0), theta=st.floats(-4.0, 4.0))
def test_products_are_lorentz_invariant(u, v, eta, theta):
    ref = relkin.dot(u, v)
    moved = relkin.dot(relkin.boost_z(relkin.rotate_z(u, theta), eta),
                       relkin.boost_z(relkin.rotate_z(v, theta), eta))
    scale = math.cosh(eta) ** 2 * (np.abs(u).sum() * np.abs(v).sum() + 1.0)
    assert moved == pytest.approx(ref, abs=1e-12 * scale)


@settings(max_examples=50, deadline=None)
@given(xi1=st.floats(0.0, 20.0), xi2=st.floats(0.0, 20.0), x=vec4)
def test_potential_square_depends_on_phase_difference(xi1, xi2, x):
    bg = relkin.Background.head_on(xi1, xi2, 0.3)
    a = relkin.potential(bg, x)
    phases = relkin.phase_variables(bg, x)
    expected = (xi1 + xi2) ** 2 - 4.0 * xi1 * xi2 * math.sin(0.5 * phases.phi_delta) ** 2
    assert -relkin.dot(a, a) == pytest.approx(expected, abs=1e-9 * (1.0 + (xi1 + xi2) ** 2))


def test_phase_variables_consistent():
    bg = relkin.Background.head_on(1.0, 1.0, 0.5, 0.8)
    x = np.array([1.0, 2.0, 3.0, 4.0])
    ph = relkin.phase_variables(bg, x)
    assert ph.phi1 == pytest.approx(0.5 * (1.0 - 4.0))
    assert ph.phi2 == pytest.approx(0.8 * (1.0 + 4.0))
    assert ph.phi_delta == pytest.approx(ph.phi1 - ph.phi2)
    assert ph.phi_sigma == pytest.approx(ph.phi1 + ph.phi2)
    assert ph.phi_bar == pytest.approx(0.5 * ph.phi_sigma)


def test_wavevectors_null_and_potential_transverse():
    bg = relkin.Background.head_on(2.0, 3.0, 0.4, 0.9)
    for w in bg.waves:
        assert relkin.dot(w.k, w.k) == 0.0
    x = np.array([0.2, 0.0, 0.0, 1.1])
    for w, da in zip(bg.waves, relkin.potential_derivative(bg, x)):
        assert relkin.dot(w.k, w.potential(w.phase(x))) == 0.0
        assert relkin.dot(w.k, da) == 0.0


def test_single_wave_invariants_vanish():
    bg = relkin.Background.head_on(3.0, 0.0, 0.5)
    p = np.array([math.sqrt(2.0), 1.0, 0.0, 0.0])
    inv = relkin.relativistic_invariants(bg, p, np.array([0.3, 0.0, 0.0, 0.1]))
    assert inv.calF == pytest.approx(0.0, abs=1e-12)
    assert inv.calG == pytest.approx(0.0, abs=1e-12)
    assert inv.valid and inv.ratio == math.inf


def test_invariants_from_explicit_fields():
    bg = relkin.Background.head_on(1.0, 2.0, 0.5, 0.5)
    x = np.array([0.4, 0.0, 0.0, 0.9])
    f = fd_field_tensor(bg, x)
    e = -f[0, 1:]
    b = -np.array([f[2, 3], f[3, 1], f[1, 2]])
    p = np.array([math.sqrt(1.0 + 0.25), 0.0, 0.5, 0.0])
    inv = relkin.relativistic_invariants(bg, p, x)
    assert inv.calF == pytest.approx(0.5 * (e @ e - b @ b), abs=1e-8)
    assert inv.calG == pytest.approx(e @ b, abs=1e-8)
    assert inv.eta == pytest.approx(relkin.dot(bg.k_bar, p))
    a = relkin.potential(bg, x)
    assert inv.xi == pytest.approx(math.sqrt(-relkin.dot(a, a)))


def test_magnetic_node_has_no_magnetic_field():
    bg = relkin.Background.head_on(4.0, 4.0, 0.2)
    f = relkin.field_tensor(bg, np.array([1.3, 0.0, 0.0, 0.0]))
    _, b = relkin.electric_magnetic(f)
    assert np.allclose(b, 0.0, atol=1e-14)


def test_off_shell_momentum_rejected():
    bg = relkin.Background.head_on(1.0, 1.0, 0.5)
    with pytest.raises(ConfigError):
        relkin.relativistic_invariants(bg, np.array([2.0, 0.0, 0.0, 0.0]), np.zeros(4))


@pytest.mark.parametrize("kwargs", [dict(xi=-1.0, omega=1.0), dict(xi=1.0, omega=0.0),
                                    dict(xi=math.nan, omega=1.0),
                                    dict(xi=1.0, omega=1.0, direction=(0.0, 0.0, 2.0)),
                                    dict(xi=1.0, omega=1.0, direction=(1.0, 0.0, 0.0))])
def test_plane_wave_validation(kwargs):
    with pytest.raises(ConfigError):
        relkin.PlaneWave(**kwargs)


def test_transverse_basis_orthogonal_to_both_wavevectors():
    bg = relkin.Background.head_on(1.0, 2.0, 0.3, 0.7)
    basis = relkin.transverse_basis(bg)
    assert set(basis) == {(1, 1), (1, 2), (2, 1), (2, 2)}
    for e in basis.values():
        assert abs(relkin.dot(e, bg.k1)) < 1e-15
        assert abs(relkin.dot(e, bg.k2)) < 1e-15


def test_degenerate_geometry_rejected():
    w = relkin.PlaneWave(1.0, 1.0)
    bg = relkin.Background(w, w)
    assert not bg.is_head_on()
    with pytest.raises(ConfigError):
        relkin.transverse_basis(bg)


def test_four_vector_arithmetic():
    a = relkin.FourVector(1.0, 2.0, 3.0, 4.0)
    b = relkin.FourVector.of([0.5, 0.5, 0.5, 0.5])
    assert np.allclose(np.asarray(a + b), [1.5, 2.5, 3.5, 4.5])
    assert np.allclose(np.asarray(2 * (a - b)), [1.0, 3.0, 5.0, 7.0])
    assert a.square() == pytest.approx(1.0 - 4.0 - 9.0 - 16.0)
    assert (-a).dot(b) == pytest.approx(-a.dot(b))
    bg = relkin.Background.head_on(1.0, 0.0, 1.0)
    assert isinstance(relkin.eval_potential(bg, np.zeros(4)), relkin.FourVector)
