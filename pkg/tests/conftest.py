import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from misotool.exact import GaussianRational

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

small_fractions = st.fractions(min_value=-4, max_value=4, max_denominator=6)
gaussian_rationals = st.builds(GaussianRational, small_fractions, small_fractions)
seeds = st.integers(min_value=0, max_value=2**31 - 1)
dims = st.integers(min_value=1, max_value=5)


@pytest.fixture
def M():
    return np.array([[0, 1], [0, 0]], dtype=complex)


@pytest.fixture
def N():
    return np.array([[0, 0], [1, 0]], dtype=complex)


@pytest.fixture(autouse=True)
def _no_tol_override(monkeypatch):
    monkeypatch.delenv("MISOTOOL_TOL", raising=False)



def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import ACCEPTANCE_LINES
    except ImportError:
        return
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
