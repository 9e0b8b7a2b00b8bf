import sys

import numpy as np
import pytest
from hypothesis import strategies as st

from cooclab.markov import regularity_check, validate_stochastic

FOUR_NODE = [
    [0, 1 / 3, 1 / 3, 1 / 3],
    [1 / 2, 0, 1 / 2, 0],
    [1 / 3, 1 / 3, 0, 1 / 3],
    [1 / 2, 0, 1 / 2, 0],
]
LAZY2 = [[0.75, 0.25], [0.25, 0.75]]
UNIFORM2 = [[0.5, 0.5], [0.5, 0.5]]


@pytest.fixture
def four_node():
    return validate_stochastic(FOUR_NODE)


@pytest.fixture
def lazy2():
    return validate_stochastic(LAZY2)


def random_regular_chain(rng: np.random.Generator, n: int, density: float = 0.6) -> np.ndarray:
    """Sparse-ish random chain made regular by a Hamiltonian cycle plus one self-loop."""
    while True:
        A = rng.random((n, n)) * (rng.random((n, n)) < density)
        A[np.arange(n), (np.arange(n) + 1) % n] += rng.uniform(0.05, 1.0, n)
        A[0, 0] += rng.uniform(0.05, 1.0)
        P = validate_stochastic(A / A.sum(axis=1, keepdims=True))
        if regularity_check(P).regular:
            return P


@st.composite
def regular_chains(draw, min_n=2, max_n=6):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_regular_chain(np.random.default_rng(seed), n)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULT_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
