from __future__ import annotations

import pytest

from univlb.expanders import lps_graph
from univlb.graphs import Graph
from univlb.metric import shortest_path_metric


@pytest.fixture(scope="session")
def lps_5_13():
    return lps_graph(5, 13)


@pytest.fixture(scope="session")
def lps_5_13_metric(lps_5_13):
    g, _ = lps_5_13
    return shortest_path_metric(g, 0)


@pytest.fixture()
def petersen() -> Graph:
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
             (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
             (5, 7), (7, 9), (9, 6), (6, 8), (8, 5)]
    return Graph(n=10, edges=tuple(edges))


@pytest.fixture()
def k4() -> Graph:
    return Graph(n=4, edges=((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)))


@pytest.fixture()
def path3() -> Graph:
    """Path r - a - b."""
    return Graph(n=3, edges=((0, 1), (1, 2)))


@pytest.fixture()
def star4() -> Graph:
    """Root 0 with leaves 1, 2, 3."""
    return Graph(n=4, edges=((0, 1), (0, 2), (0, 3)))


@pytest.fixture()
def cycle4() -> Graph:
    """4-cycle r - a - b - c."""
    return Graph(n=4, edges=((0, 1), (1, 2), (2, 3), (3, 0)))
