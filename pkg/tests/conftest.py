import pytest

from ieit.model import ProbeDrive, SystemParams
from ieit.steady_state import fix_operating_point

ACCEPTANCE = []


def red_sideband(G, gamma_m=4.0, kappa=1.0, kappa0=0.0, omega_m=1000.0, g=1e-3):
    """Parameters in kappa units pumped to coupling G on the red sideband."""
    p = SystemParams(omega_m=omega_m * kappa, gamma_m=gamma_m * kappa, kappa=kappa,
                     kappa0=kappa0 * kappa, g=g * kappa, G=G * kappa)
    return p, fix_operating_point(p)


@pytest.fixture
def setup():
    return red_sideband


@pytest.fixture
def equal_drive():
    def make(x=0.0, eps=1.0):
        return ProbeDrive(eps, eps, x)

    return make


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
