import math

import numpy as np
import pytest

from counterwave import relkin

ACCEPTANCE = {}


def record(criterion, passed, detail):
    """Store the outcome of an acceptance criterion for the terminal summary."""
    ACCEPTANCE[criterion] = (passed, detail)
    print(f"criterion {criterion}: {'PASS' if passed else 'FAIL'} - {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[criterion]
        terminalreporter.write_line(
            f"criterion {criterion:>2}: {'PASS' if passed else 'FAIL'} - {detail}")


def node_pi(bg, phi_start, frac_x, frac_y):
    """Canonical momentum with p_perp = (frac_x a_x, frac_y a_y) at the start phase."""
    a = relkin.potential(bg, np.array([phi_start / bg.wave1.omega, 0.0, 0.0, 0.0]))
    return np.array([0.0, (1.0 + frac_x) * a[1], (1.0 + frac_y) * a[2], 0.0])


def on_shell_z(pz):
    return np.array([math.sqrt(1.0 + pz * pz), 0.0, 0.0, pz])


@pytest.fixture
def node_bg():
    return relkin.Background.head_on(10.0, 10.0, 0.01)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
