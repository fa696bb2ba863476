import numpy as np
import pytest

from wxcompress.geo_graph import build_graph, graph_from_edges, laplacian
from wxcompress.scene import SiteIndex
from wxcompress.spectral import eigendecompose


def random_sites(rng, n, lat=(30.0, 45.0), lon=(-110.0, -80.0)):
    return SiteIndex.from_coordinates(rng.uniform(*lat, n), rng.uniform(*lon, n))


def path_graph(n):
    return graph_from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    return graph_from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def make_basis(sites, threshold=150.0, method="auto"):
    graph = build_graph(sites, threshold)
    H = laplacian(graph)
    return graph, H, eigendecompose(H, sites, threshold, method=method)


@pytest.fixture
def rng():
    return np.random.default_rng(20210118)


@pytest.fixture(scope="session")
def geo_basis():
    """Seeded 120-site geometric graph with its basis."""
    rng = np.random.default_rng(7)
    sites = random_sites(rng, 120)
    graph, H, basis = make_basis(sites)
    return sites, graph, H, basis


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.report_lines():
        terminalreporter.write_line(line)
