import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from counterwave import emission as em
from counterwave.errors import ConfigError, NonConvergenceError


def mp_harmonic(xi, kp, s, alpha=em.ALPHA):
    """W_s by mpmath quadrature in the original light-front variable u."""
    with mpmath.workdps(30):
        xi = mpmath.mpf(xi)
        kp = mpmath.mpf(kp)
        us = 2 * s * kp / (1 + xi ** 2)
        c = 2 * s * xi / mpmath.sqrt(1 + xi ** 2)

        def integrand(u):
            t = u / us
            z = c * mpmath.sqrt(t * (1 - t))
            j = lambda n: mpmath.besselj(n, z)
            bracket = -4 * j(s) ** 2 * (1 + xi ** 2) + 2 * xi ** 2 * (j(s + 1) ** 2 + j(s - 1) ** 2)
            return bracket / (1 + u) ** 2

        return float(alpha / (4 * kp) * mpmath.quad(integrand, [0, us / 2, us]))


@pytest.mark.parametrize("xi,kp,s", [(0.1, 0.01, 1), (1.0, 0.005, 3), (1.0, 0.02, 7), (2.0, 0.5, 5)])
def test_harmonic_matches_mpmath(xi, kp, s):
    cfg = em.EmissionConfig(xi, kp)
    assert em.harmonic_probability(cfg, s) == pytest.approx(mp_harmonic(xi, kp, s), rel=1e-9)


@pytest.mark.parametrize("xi", [0.1, 1.0])
@pytest.mark.parametrize("kp", [0.005, 0.01, 0.02])
def test_quadrature_schemes_agree(xi, kp):
    cfg = em.EmissionConfig(xi, kp)
    for s in range(1, 11):
        a = em.harmonic_probability(cfg, s, "adaptive")
        b = em.harmonic_probability(cfg, s, "gauss")
        assert a == pytest.approx(b, rel=1e-6)


@pytest.mark.parametrize("s", [1, 2, 3, 4])
def test_small_intensity_scaling(s):
    lo = em.harmonic_probability(em.EmissionConfig(1e-3, 0.01), s)
    hi = em.harmonic_probability(em.EmissionConfig(1e-2, 0.01), s)
    assert math.log10(hi / lo) == pytest.approx(2 * s, rel=0.05)


@settings(max_examples=40, deadline=None)
@given(xi=st.floats(0.0, 5.0), kp=st.floats(1e-3, 1.0), s=st.integers(1, 20),
       t=st.floats(0.0, 1.0))
def test_integrand_nonnegative(xi, kp, s, t):
    cfg = em.EmissionConfig(xi, kp)
    assert em.harmonic_integrand(cfg, s, t) >= -1e-300


def test_bessel_argument_range():
    z = em.bessel_argument(3, 1.0, np.array([0.0, 0.5, 1.0]), 1.0)
    assert z[0] == 0.0 and z[2] == 0.0
    assert z[1] == pytest.approx(3.0 / math.sqrt(2.0))
    with pytest.raises(ConfigError):
        em.bessel_argument(3, 1.0, 1.5, 1.0)
    with pytest.raises(ConfigError):
        em.bessel_argument(3, 1.0, 0.5, 0.0)


def test_zero_intensity_gives_zero_spectrum():
    sp = em.spectrum(em.EmissionConfig(0.0, 0.01, s_max=5))
    assert [w for _, w in sp.entries] == [0.0] * 5
    assert sp.total == 0.0 and sp.converged


def test_weak_field_spectrum_decreases_and_stops_early():
    sp = em.spectrum(em.EmissionConfig(0.1, 0.01))
    w = [v for _, v in sp.entries]
    assert all(a > b for a, b in zip(w, w[1:]))
    assert sp.stopped_early and sp.converged
    assert np.allclose(sp.cumulative()[-1], sp.total)


def test_strong_field_spectrum_converges_by_fifty_harmonics():
    sp = em.spectrum(em.EmissionConfig(1.0, 0.01, s_max=50))
    assert sp.converged
    assert sp.tail < 1e-8 * sp.total


def test_truncated_spectrum_reports_nonconvergence():
    sp = em.spectrum(em.EmissionConfig(3.0, 0.01, s_max=10))
    assert not sp.converged
    assert sp.tail > 1e-8 * sp.total


def test_quadrature_failure_raises():
    # thousands of Bessel oscillations at a tolerance near roundoff exhaust QUADPACK
    with pytest.raises(NonConvergenceError):
        em.harmonic_probability(em.EmissionConfig(50.0, 0.01, quad_tol=1.2e-14), 3000)


@pytest.mark.parametrize("kwargs", [dict(xi=-1.0, kp=0.01), dict(xi=1.0, kp=0.0),
                                    dict(xi=1.0, kp=0.01, s_max=0), dict(xi=1.0, kp=0.01, quad_tol=0.0),
                                    dict(xi=1.0, kp=0.01, quad_tol=1e-300)])
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        em.EmissionConfig(**kwargs)


def test_bad_scheme_and_harmonic_rejected():
    cfg = em.EmissionConfig(1.0, 0.01)
    with pytest.raises(ConfigError):
        em.harmonic_probability(cfg, 2, scheme="simpson")
    with pytest.raises(ConfigError):
        em.harmonic_probability(cfg, 0)


@settings(max_examples=100, deadline=None)
@given(l=st.floats(-100.0, 100.0).filter(lambda v: v != 0.0))
def test_node_emission_unstable_for_any_recoil(l):
    stab = em.node_emission_stability(l)
    assert stab.unstable and stab.recoil == -l


def test_node_emission_stable_without_recoil():
    stab = em.node_emission_stability(0.0)
    assert not stab.unstable and stab.recoil == 0.0


def test_tail_estimate_with_few_harmonics():
    spec = em.spectrum(em.EmissionConfig(0.01, 0.02, s_max=3))
    w = [v for _, v in spec.entries]
    r = max(w[1] / w[0], w[2] / w[1])
    assert spec.tail == pytest.approx(w[2] * r / (1.0 - r), rel=1e-12)
    assert spec.converged
