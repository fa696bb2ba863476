from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wxcompress.compress import (SparseApproximation, analyze, classification_stats, compressibility_curve,
                                 compressibility_level, dominant_vectors, ensemble_stats,
                                 reconstruct_categorical, reconstruction_error_stats, synthesize, top_k)
from wxcompress.errors import (ArgumentError, CompatibilityError, DegenerateReconstructionError,
                               UndefinedLevelError)
from wxcompress.geo_graph import laplacian
from wxcompress.scene import SceneVector, SiteIndex, WeatherQuantity
from wxcompress.spectral import GraphSpectralBasis, eigendecompose

from conftest import path_graph


def brute_force_energy(c, k):
    """Best energy any k-subset of coefficients can capture, by enumeration."""
    return max((sum(c[i] ** 2 for i in s) for s in combinations(range(len(c)), k)), default=0.0)


def path_basis_analytic(n):
    """Closed-form path-graph Laplacian eigenvectors (DCT-II columns)."""
    j = np.arange(n)
    V = np.column_stack([np.cos(np.pi * k * (j + 0.5) / n) for k in range(n)])
    return V / np.linalg.norm(V, axis=0)


# --- analyze -------------------------------------------------------------------

def test_analyze_basis_column(geo_basis):
    _, _, _, basis = geo_basis
    c = analyze(basis, basis.eigenvectors[:, 17])
    e = np.zeros(basis.n)
    e[17] = 1
    assert np.abs(c.coeffs - e).max() <= 1e-9


def test_analyze_zero(geo_basis):
    c = analyze(geo_basis[3], np.zeros(geo_basis[3].n))
    assert np.all(c.coeffs == 0) and c.total_energy == 0


def test_analyze_parseval_norm5(geo_basis, rng):
    x = rng.standard_normal(geo_basis[3].n)
    x *= 5 / np.linalg.norm(x)
    c = analyze(geo_basis[3], x)
    assert c.total_energy == pytest.approx(25, rel=1e-9)
    assert c.total_energy == pytest.approx(float(np.sum(c.coeffs ** 2)), rel=1e-9)


def test_analyze_fingerprint_guard(geo_basis):
    sites, _, _, basis = geo_basis
    good = SceneVector(WeatherQuantity.TEMPERATURE, sites.fingerprint, np.ones(basis.n))
    assert analyze(basis, good).site_fingerprint == sites.fingerprint
    bad = SceneVector(WeatherQuantity.TEMPERATURE, b"\0" * 32, np.ones(basis.n))
    with pytest.raises(CompatibilityError):
        analyze(basis, bad)
    with pytest.raises(CompatibilityError):
        analyze(basis, np.ones(basis.n + 1))


# --- top_k / level / curve --------------------------------------------------------

def test_top_k_examples():
    s = top_k([3, 0, 4, 0], 1)
    assert s.entries == [(2, 4.0)]
    assert top_k([2, -2, 1], 1).entries == [(0, 2.0)]
    assert top_k([1, 2], 0).entries == []
    with pytest.raises(ArgumentError):
        top_k([1, 2], 3)


def test_level_examples():
    assert compressibility_level([3, 0, 4, 0], 1) == pytest.approx(16 / 25, abs=1e-15)
    assert compressibility_level([1, -1, 1, -1], 1) == 0.25
    with pytest.raises(UndefinedLevelError):
        compressibility_level([0, 0], 1)


def test_curve_examples():
    assert compressibility_curve([3, 0, 4, 0], [1, 2]).points == ((1, pytest.approx(0.64)), (2, 1.0))
    assert compressibility_curve([3, 0, 4, 0], [4]).points == ((4, 1.0),)
    assert compressibility_curve([3, 0, 4, 0], [0]).points == ((0, 0.0),)
    with pytest.raises(ArgumentError):
        compressibility_curve([3, 0, 4, 0], [2, 1])


def test_exactly_k_compressible(geo_basis, rng):
    basis = geo_basis[3]
    cols = rng.choice(basis.n, 3, replace=False)
    x = basis.eigenvectors[:, cols] @ rng.uniform(1, 2, 3)
    assert compressibility_level(analyze(basis, x), 3) >= 1 - 1e-9


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1, max_size=9), st.data())
def test_top_k_optimal_by_enumeration(c, data):
    c = np.array(c)
    k = data.draw(st.integers(0, len(c)))
    s = top_k(c, k)
    assert len(s.entries) == k
    assert len(set(s.indices.tolist())) == k
    assert abs(s.energy() - brute_force_energy(c, k)) <= 1e-12 * max(1.0, float(np.sum(c ** 2)))
    mags = np.abs(s.values)
    assert np.all(np.diff(mags) <= 0)
    assert set(dominant_vectors(c, k)) == set(s.indices.tolist())


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1, max_size=30).filter(
    lambda c: sum(v * v for v in c) > 1e-6))
def test_level_laws(c):
    n = len(c)
    curve = compressibility_curve(c, list(range(n + 1)))
    levels = curve.levels
    assert all(b >= a for a, b in zip(levels, levels[1:]))
    assert levels[-1] == pytest.approx(1.0, abs=1e-9)
    assert all(lv >= k / n - 1e-12 for k, lv in curve.points)
    assert all(lv <= 1.0 for lv in levels)


# --- synthesize / round trip --------------------------------------------------------

def test_synthesize_examples(geo_basis, rng):
    basis = geo_basis[3]
    x = rng.standard_normal(basis.n)
    c = analyze(basis, x)
    assert np.abs(synthesize(basis, top_k(c, basis.n)) - x).max() <= 1e-8
    assert np.array_equal(synthesize(basis, top_k(c, 0)), np.zeros(basis.n))
    single = SparseApproximation(1, np.array([4]), np.array([2.5]))
    np.testing.assert_array_equal(synthesize(basis, single), 2.5 * basis.eigenvectors[:, 4])
    with pytest.raises(ArgumentError):
        synthesize(basis, SparseApproximation(1, np.array([basis.n]), np.array([1.0])))


def test_residual_orthogonal_to_retained(geo_basis, rng):
    basis = geo_basis[3]
    x = rng.standard_normal(basis.n)
    s = top_k(analyze(basis, x), 15)
    xs = synthesize(basis, s)
    assert np.abs(basis.eigenvectors[:, s.indices].T @ (x - xs)).max() <= 1e-8
    assert float(xs @ xs) == pytest.approx(s.energy(), rel=1e-9)


# --- categorical reconstruction --------------------------------------------------------

def categorical_oracle(V, x, k):
    coeffs = V.T @ x
    best = max(combinations(range(len(x)), k), key=lambda s: sum(coeffs[i] ** 2 for i in s))
    y = sum(coeffs[i] * V[:, i] for i in best)
    alpha = np.linalg.norm(x) / np.linalg.norm(y)
    return np.clip(np.floor(alpha * y + 0.5), 0, 1)


@pytest.mark.parametrize("x", [[1, 1, 0, 0], [0, 1, 1, 0], [1, 0, 0, 1], [0, 0, 1, 0], [1, 1, 1, 0]])
def test_categorical_path4_against_enumeration(x):
    x = np.array(x, dtype=float)
    basis = eigendecompose(laplacian(path_graph(4)))
    np.testing.assert_allclose(np.abs(basis.eigenvectors), np.abs(path_basis_analytic(4)), atol=1e-12)
    got = reconstruct_categorical(basis, top_k(analyze(basis, x), 2), np.linalg.norm(x))
    np.testing.assert_array_equal(got, categorical_oracle(path_basis_analytic(4), x, 2))


def test_categorical_exact_and_zero(geo_basis, rng):
    basis = geo_basis[3]
    x = (rng.random(basis.n) < 0.3).astype(float)
    got = reconstruct_categorical(basis, top_k(analyze(basis, x), basis.n), np.linalg.norm(x))
    np.testing.assert_array_equal(got, x)
    zero = reconstruct_categorical(basis, top_k(analyze(basis, np.zeros(basis.n)), 0), 0.0)
    assert np.array_equal(zero, np.zeros(basis.n))
    with pytest.raises(DegenerateReconstructionError):
        reconstruct_categorical(basis, top_k(analyze(basis, x), 0), 3.0)
    with pytest.raises(ArgumentError):
        reconstruct_categorical(basis, top_k(analyze(basis, x), 0), -1.0)


def test_categorical_rounds_half_up():
    basis = GraphSpectralBasis(np.zeros(2), np.eye(2))
    out = reconstruct_categorical(basis, SparseApproximation(2, np.array([0, 1]), np.array([0.5, 0.4999])), 0.5 ** 0.5)
    # alpha rescales (0.5, 0.4999) to norm sqrt(0.5): roughly (0.50007, 0.49997)
    assert out.tolist() == [1.0, 0.0]


# --- dominant / stats ------------------------------------------------------------------

def test_dominant_examples():
    assert dominant_vectors([3, 0, 4, 0], 2) == [2, 0]
    assert dominant_vectors([3, 0, 4, 0], 0) == []
    assert dominant_vectors([1, 1], 1) == [0]
    with pytest.raises(ArgumentError):
        dominant_vectors([1, 1], 3)


def test_error_stats_examples():
    s = reconstruction_error_stats([1.0, 2.0], [1.0, 2.0], [0.5, 2])
    assert s.fractions == (1.0, 1.0) and s.max_abs_error == 0
    s = reconstruction_error_stats([0, 0], [1, 3], [2])
    assert s.fractions == (0.5,) and s.max_abs_error == 3
    s = reconstruction_error_stats([0, 0], [1, 3], [])
    assert s.fractions == () and s.max_abs_error == 3
    with pytest.raises(ArgumentError):
        reconstruction_error_stats([0], [0, 1], [1])


def test_classification_examples():
    s = classification_stats([1, 0, 1], [1, 0, 1])
    assert (s.accuracy, s.recall) == (1.0, 1.0)
    s = classification_stats([1, 1, 0, 0], [1, 0, 0, 0])
    assert (s.accuracy, s.recall) == (0.75, 0.5)
    assert classification_stats([0, 0], [0, 1]).recall is None
    with pytest.raises(ArgumentError):
        classification_stats([0, 2], [0, 1])


def test_ensemble_examples():
    a = [1.0, 0.0]
    st_ = ensemble_stats([a], 1)
    assert st_.mean_level == st_.min_level == 1.0 and st_.scene_count == 1
    # levels 0.6 and 0.8 at k = 1
    s = ensemble_stats([[0.6 ** 0.5, 0.4 ** 0.5], [0.8 ** 0.5, 0.2 ** 0.5]], 1)
    assert s.mean_level == pytest.approx(0.7) and s.min_level == pytest.approx(0.6)
    assert s.min_level <= s.mean_level <= 1
    with pytest.raises(ArgumentError):
        ensemble_stats([], 1)
