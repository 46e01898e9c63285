import numpy as np
import pytest
from hypothesis import strategies as st

from deficit_atlas.state import XxzState


def tetra_points(n, rng):
    """Uniform samples of the tetrahedron as (s1, c1, c3) arrays."""
    q = rng.dirichlet(np.ones(4), size=n)
    s1 = q[:, 0] + q[:, 1] + 2 * q[:, 2] - 1
    c1 = q[:, 0] - q[:, 1]
    c3 = 1 - 2 * (q[:, 0] + q[:, 1])
    return s1, c1, c3


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture
def sample_state():
    return XxzState(0.2, 0.3, 0.1)


@st.composite
def xxz_states(draw, margin=0.0):
    """Hypothesis strategy for states in the tetrahedron, shrunk by ``margin``."""
    c3 = draw(st.floats(-1 + margin, 1 - margin))
    smax = max((1 + c3) / 2 - margin, 0.0)
    cmax = max((1 - c3) / 2 - margin, 0.0)
    s1 = draw(st.floats(-smax, smax))
    c1 = draw(st.floats(-cmax, cmax))
    return XxzState(s1, c1, c3)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
