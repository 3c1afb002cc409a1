import numpy as np
import pytest
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from geostrain.linalg import random_glp, random_rotation

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20131014)


def matrices(n, bound=3.0):
    return arrays(np.float64, (n, n), elements=st.floats(-bound, bound, allow_nan=False, width=64))


dims = st.sampled_from([2, 3])
seeds = st.integers(0, 2**32 - 1)


@st.composite
def glp(draw, n=None, cond_max=50.0):
    n = draw(dims) if n is None else n
    return random_glp(n, draw(seeds), cond_max)


@st.composite
def rotations(draw, n=None):
    n = draw(dims) if n is None else n
    return random_rotation(n, draw(seeds))


def rot(theta):
    return np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])


J = np.array([[0.0, -1.0], [1.0, 0.0]])
