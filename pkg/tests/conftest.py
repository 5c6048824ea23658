import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

TWO_STATE = np.array([[0.75, 0.25], [0.25, 0.75]])
UNIFORM2 = np.full((2, 2), 0.5)


@st.composite
def stochastic_matrices(draw, min_n=2, max_n=6, sparse=True):
    """Row-stochastic matrices, optionally with zero entries to exercise structure."""
    n = draw(st.integers(min_n, max_n))
    w = draw(arrays(np.float64, (n, n), elements=st.floats(0.01, 1.0)))
    if sparse:
        mask = draw(arrays(np.bool_, (n, n)))
        w = np.where(mask, 0.0, w)
        # Keep every row nonempty.
        empty = w.sum(axis=1) == 0
        w[empty, draw(st.integers(0, n - 1))] = 1.0
    return w / w.sum(axis=1, keepdims=True)


def reset_shift(n, s):
    """Interior point of the reset/shift family, written out by hand."""
    P = np.zeros((n, n))
    P[:, 0] += 1 - s
    for i in range(n - 1):
        P[i, i + 1] += s
    P[n - 1, n - 1] += s
    return P


def sqrt_n_eps_ok(n, eps):
    return eps < 0.5 / math.sqrt(n)


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_report():
    """Collect one pass/fail line per acceptance criterion for the terminal summary."""
    return _ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
