import numpy as np
import pytest

from stirap.experiments import SweepSpec


# Ideal transfer (gamma=0, no cross terms, a=3*pi, t_s=-1.5 sigma, 5 sigma window).
# Frozen from liouvillian_oracle at refine=64, which agrees with RK4 to 1.3e-12.
P2_IDEAL = 0.999741237248


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def spec():
    return SweepSpec()


def random_hermitian(rng, n=3, scale=1.0):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (a + a.conj().T) / 2


def random_density_matrix(rng, n=3):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES = {}


def record_criterion(number, title, passed, detail):
    line = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
