import numpy as np
import pytest

from senet.episodes import Episode


def random_episode(rng, way=5, shot=5, query=10, dim=16, scale=1.0):
    """Gaussian embeddings with every class present among the queries when possible."""
    supports = scale * rng.standard_normal((way * shot, dim))
    labels = np.repeat(np.arange(way), shot)
    qlabels = np.arange(query) % way
    queries = scale * rng.standard_normal((query, dim))
    return Episode(supports, labels, queries, qlabels, np.arange(way))


def random_rotation(rng, dim):
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
