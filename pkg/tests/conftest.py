import numpy as np
import pytest

from discread import _accel
from discread.system import ReadoutSystem

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def system():
    """Default optical chain (780 nm, NA 0.47, N_inc 25), shared across tests."""
    return ReadoutSystem()


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    if request.param == "numba" and not _accel.HAVE_NUMBA:
        pytest.skip("numba not installed")
    monkeypatch.setattr(_accel, "USE_NUMBA", request.param == "numba")
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
