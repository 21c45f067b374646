import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def naive_steering(angle, n, indices=None):
    # direct per-entry formula, no vectorization
    idx = range(n) if indices is None else indices
    return np.array([np.exp(1j * np.pi * k * np.sin(angle)) for k in idx]) / np.sqrt(n)


def arc_contains(center, width, angle, tol=1e-9):
    """Is ``angle`` inside the circular arc center +/- width/2."""
    d = (angle - center + np.pi) % (2 * np.pi) - np.pi
    return abs(d) <= width / 2 + tol


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
