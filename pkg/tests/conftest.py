import numpy as np
import pytest

from tpgmatch.graph import AttributedGraph


def random_graph(rng, n, density=0.5, directed=True, node_dim=1, edge_dim=1):
    """Random attributed graph; undirected graphs get one attribute per edge."""
    mask = rng.random((n, n)) < density
    np.fill_diagonal(mask, False)
    if not directed:
        mask = np.triu(mask, 1)
    src, dst = np.nonzero(mask)
    return AttributedGraph(rng.uniform(size=(n, node_dim)), np.column_stack([src, dst]),
                           rng.uniform(size=(len(src), edge_dim)), directed=directed)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def triangle():
    """Undirected triangle: arcs both ways on every pair."""
    return AttributedGraph(np.array([[0.1], [0.5], [0.9]]), [(0, 1), (1, 2), (0, 2)],
                           np.array([[0.2], [0.4], [0.6]]), directed=False)


@pytest.fixture
def path3():
    return AttributedGraph(np.array([[0.0], [0.4], [0.8]]), [(0, 1), (1, 2)],
                           np.array([[0.3], [0.7]]))


def pytest_terminal_summary(terminalreporter):
    from checks import ACCEPTANCE_LINES
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
