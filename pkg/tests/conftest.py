from pathlib import Path

import numpy as np
import pytest

from fredholm_lab.family import SampledLoop
from fredholm_lab.grassmann import Subspace

FIXTURES = Path(__file__).parent / "fixtures"

# filled by test_acceptance; echoed in the terminal summary so the
# per-criterion lines survive output capture
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def line(t: float) -> Subspace:
    return Subspace(np.array([[np.cos(t)], [np.sin(t)]], dtype=complex))


@pytest.fixture
def rotating_line_loop():
    """span{(cos t, sin t)}, t in [0, pi]: 64 steps, closed (last sample is the first)."""
    ts = np.linspace(0.0, np.pi, 65)
    samples = [line(t) for t in ts[:-1]] + [line(0.0)]
    return SampledLoop(tuple(samples), ts / np.pi)
