import numpy as np
import pytest

from wxcompress import kernels
from wxcompress.errors import ArgumentError, NumericalError
from wxcompress.geo_graph import build_graph, connected_components, graph_from_edges, laplacian
from wxcompress.spectral import GraphSpectralBasis, eigendecompose, verify_basis

from conftest import cycle_graph, make_basis, path_graph, random_sites

METHODS = ["auto", "lapack", "ql-python"] + (["ql"] if kernels.BACKEND == "cython" else [])


def path_spectrum(n):
    return np.sort(2 - 2 * np.cos(np.arange(n) * np.pi / n))


@pytest.mark.parametrize("method", METHODS)
def test_small_spectra(method):
    b = eigendecompose(laplacian(path_graph(3)), method=method)
    np.testing.assert_allclose(b.eigenvalues, [0, 1, 3], atol=1e-8)
    b = eigendecompose(laplacian(cycle_graph(4)), method=method)
    np.testing.assert_allclose(b.eigenvalues, [0, 2, 2, 4], atol=1e-8)
    b = eigendecompose(laplacian(graph_from_edges(5, [])), method=method)
    assert np.all(b.eigenvalues == 0)


@pytest.mark.parametrize("method", METHODS)
@pytest.mark.parametrize("n", range(2, 13))
def test_path_spectrum_oracle(method, n):
    b = eigendecompose(laplacian(path_graph(n)), method=method)
    assert np.abs(b.eigenvalues - path_spectrum(n)).max() <= 1e-8


@pytest.mark.parametrize("method", METHODS)
def test_geometric_graph_invariants(method, rng):
    sites = random_sites(rng, 90)
    graph, H, basis = make_basis(sites, 140.0, method)
    diag = verify_basis(basis, H)
    assert diag.ok, diag.breaches
    assert diag.zero_eigenvalue_count == connected_components(graph)[0]
    assert basis.eigenvalues.sum() == pytest.approx(2 * graph.edge_count, rel=1e-6)
    assert basis.site_fingerprint == sites.fingerprint


def test_sign_convention(geo_basis):
    _, _, _, basis = geo_basis
    V = basis.eigenvectors
    idx = np.argmax(np.abs(V), axis=0)
    assert np.all(V[idx, np.arange(V.shape[1])] > 0)


def test_sign_tie_broken_by_lowest_index():
    # P2 eigenvectors have two entries of equal magnitude
    b = eigendecompose(laplacian(path_graph(2)))
    v = b.eigenvectors[:, 1]
    assert v[0] > 0 and v[1] < 0


def test_constant_null_vector_for_connected_graph():
    sites = random_sites(np.random.default_rng(3), 60, lat=(38, 40), lon=(-100, -97))
    graph, H, basis = make_basis(sites, 200.0)
    assert connected_components(graph)[0] == 1
    v0 = basis.eigenvectors[:, 0]
    assert np.abs(v0 - 1 / np.sqrt(60)).max() <= 1e-8


@pytest.mark.parametrize("method", METHODS)
def test_deterministic(method, geo_basis):
    _, _, H, _ = geo_basis
    a = eigendecompose(H, method=method)
    b = eigendecompose(H.copy(), method=method)
    assert a.eigenvalues.tobytes() == b.eigenvalues.tobytes()
    assert a.eigenvectors.tobytes() == b.eigenvectors.tobytes()


def test_rejects_asymmetric_and_unknown_method():
    with pytest.raises(ArgumentError):
        eigendecompose(np.array([[1.0, -1.0], [0.0, 0.0]]))
    with pytest.raises(ArgumentError):
        eigendecompose(np.zeros((2, 3)))
    with pytest.raises(ArgumentError):
        eigendecompose(np.zeros((2, 2)), method="jacobi")


def test_iteration_budget_error(monkeypatch, geo_basis):
    import wxcompress.spectral as spectral
    monkeypatch.setattr(spectral, "MAX_QL_ITERATIONS", 0)
    with pytest.raises(NumericalError, match="column"):
        spectral.eigendecompose(geo_basis[2], method="ql-python")


def test_verify_negated_column_passes(geo_basis):
    _, _, H, basis = geo_basis
    V = basis.eigenvectors.copy()
    V[:, 5] *= -1
    diag = verify_basis(GraphSpectralBasis(basis.eigenvalues.copy(), V), H)
    assert diag.ok


def test_verify_swapped_columns_flagged(geo_basis):
    _, _, H, basis = geo_basis
    w, V = basis.eigenvalues.copy(), basis.eigenvectors.copy()
    w[[3, 40]] = w[[40, 3]]
    V[:, [3, 40]] = V[:, [40, 3]]
    diag = verify_basis(GraphSpectralBasis(w, V), H)
    assert not diag.ascending
    assert any("ascending" in b for b in diag.breaches)
    # swapping only the vectors breaks the eigen-pairing instead
    V2 = basis.eigenvectors.copy()
    V2[:, [3, 40]] = V2[:, [40, 3]]
    assert not verify_basis(GraphSpectralBasis(basis.eigenvalues.copy(), V2), H).ok


def test_verify_dimension_mismatch(geo_basis):
    with pytest.raises(ArgumentError):
        verify_basis(geo_basis[3], np.zeros((3, 3)))


def test_disconnected_zero_multiplicity():
    H = laplacian(graph_from_edges(6, [(0, 1), (2, 3)]))
    b = eigendecompose(H)
    diag = verify_basis(b, H)
    assert diag.ok and diag.zero_eigenvalue_count == 4
