import numpy as np
import pytest
from hypothesis import strategies as st

from predictability.dist import DiscretePmf
from predictability.markov import build_chain
from predictability.omm import ObservableModel


@pytest.fixture
def two_state():
    """P = [[0.9, 0.1], [0.4, 0.6]] with point-mass posteriors at 0 and 1."""
    chain = build_chain([[0.9, 0.1], [0.4, 0.6]])
    return ObservableModel(chain, (DiscretePmf.point(0), DiscretePmf.point(1)))


@st.composite
def pmfs(draw, max_len=8, max_offset=5):
    n = draw(st.integers(1, max_len))
    w = draw(st.lists(st.floats(0.01, 1.0), min_size=n, max_size=n))
    off = draw(st.integers(-max_offset, max_offset))
    return DiscretePmf.from_weights(off, w)


def random_reversible_chain(rng: np.random.Generator, n: int):
    """Detailed-balance chain from a random symmetric conductance matrix."""
    C = rng.random((n, n))
    C = C + C.T
    # random sparsity keeps some chains slow-mixing
    mask = rng.random((n, n)) < 0.5
    mask = mask | mask.T
    np.fill_diagonal(mask, True)
    for i in range(n - 1):
        mask[i, i + 1] = mask[i + 1, i] = True
    C = C * mask
    return build_chain(C / C.sum(axis=1, keepdims=True))


def random_model(rng: np.random.Generator, n: int, grid: int = 12):
    chain = random_reversible_chain(rng, n)
    posts = []
    for _ in range(n):
        off = int(rng.integers(0, 4))
        length = int(rng.integers(1, grid))
        w = rng.random(length) ** 3 + 1e-3
        posts.append(DiscretePmf.from_weights(off, w))
    return ObservableModel(chain, tuple(posts))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
