"""Sparse approximation of scenes in an orthonormal basis and compressibility metrics.

The K-compressibility level of a scene is the largest fraction of its energy
that any K basis vectors can capture. For an orthonormal basis this is the
energy of the K largest-magnitude spectral coefficients divided by the total.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (ArgumentError, CompatibilityError, DegenerateReconstructionError,
                     UndefinedLevelError)
from .scene import SceneVector


@dataclass(frozen=True)
class SpectralCoefficients:
    site_fingerprint: bytes
    coeffs: np.ndarray
    total_energy: float

    @property
    def n(self) -> int:
        return self.coeffs.shape[0]

    def ranking(self) -> np.ndarray:
        """Basis indices by descending |coefficient|, ties by ascending index."""
        return np.argsort(-np.abs(self.coeffs), kind="stable")

    def captured_energy(self) -> np.ndarray:
        """``out[k]`` is the energy of the top-k coefficients, k = 0..n."""
        sq = self.coeffs[self.ranking()] ** 2
        return np.concatenate([[0.0], np.cumsum(sq)])


@dataclass(frozen=True)
class SparseApproximation:
    k: int
    indices: np.ndarray
    values: np.ndarray

    @property
    def entries(self):
        return list(zip(self.indices.tolist(), self.values.tolist()))

    def energy(self) -> float:
        return float(np.sum(self.values ** 2))


@dataclass(frozen=True)
class CompressibilityCurve:
    points: tuple  # ((k, level), ...)

    @property
    def ks(self):
        return [p[0] for p in self.points]

    @property
    def levels(self):
        return [p[1] for p in self.points]


@dataclass(frozen=True)
class EnsembleStats:
    k: int
    mean_level: float
    min_level: float
    scene_count: int


def _coerce(coeffs) -> SpectralCoefficients:
    if isinstance(coeffs, SpectralCoefficients):
        return coeffs
    c = np.asarray(coeffs, dtype=np.float64)
    return SpectralCoefficients(b"", c, _ranked_energy(c))


def _ranked_energy(c):
    # Summed in descending-magnitude order so that the top-n energy equals
    # the total exactly and every level is at most 1.
    if not c.size:
        return 0.0
    return float(np.cumsum(c[np.argsort(-np.abs(c), kind="stable")] ** 2)[-1])


def analyze(basis, x) -> SpectralCoefficients:
    """Spectral coefficients of scene ``x`` (a SceneVector or plain array)."""
    if isinstance(x, SceneVector):
        if basis.site_fingerprint and x.site_fingerprint != basis.site_fingerprint:
            raise CompatibilityError(
                "scene and basis were built over different site lists",
                expected=basis.site_fingerprint, actual=x.site_fingerprint)
        fingerprint, values = x.site_fingerprint, x.values
    else:
        fingerprint, values = basis.site_fingerprint, np.asarray(x, dtype=np.float64)
    if values.shape != (basis.n,):
        raise CompatibilityError(f"scene has {values.shape[0]} entries, basis has {basis.n}")
    c = basis.eigenvectors.T @ values
    return SpectralCoefficients(fingerprint, c, _ranked_energy(c))


def _check_k(k, n, what="k"):
    if int(k) != k or not 0 <= k <= n:
        raise ArgumentError(f"{what} must be an integer in [0, {n}], got {k}")
    return int(k)


def top_k(coeffs, k) -> SparseApproximation:
    coeffs = _coerce(coeffs)
    k = _check_k(k, coeffs.n)
    idx = coeffs.ranking()[:k]
    return SparseApproximation(k, idx, coeffs.coeffs[idx])


def compressibility_level(coeffs, k) -> float:
    coeffs = _coerce(coeffs)
    k = _check_k(k, coeffs.n)
    if not coeffs.total_energy > 0:
        raise UndefinedLevelError("compressibility level is undefined for a zero-energy scene")
    return float(coeffs.captured_energy()[k] / coeffs.total_energy)


def compressibility_curve(coeffs, k_list: Sequence[int]) -> CompressibilityCurve:
    coeffs = _coerce(coeffs)
    ks = [_check_k(k, coeffs.n) for k in k_list]
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise ArgumentError(f"k list must be strictly increasing: {list(k_list)}")
    if not ks:
        return CompressibilityCurve(())
    if not coeffs.total_energy > 0:
        raise UndefinedLevelError("compressibility level is undefined for a zero-energy scene")
    captured = coeffs.captured_energy()
    return CompressibilityCurve(tuple((k, float(captured[k] / coeffs.total_energy)) for k in ks))


def synthesize(basis, sparse: SparseApproximation) -> np.ndarray:
    idx = np.asarray(sparse.indices, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= basis.n):
        raise ArgumentError(f"basis index out of range for n = {basis.n}")
    return basis.eigenvectors[:, idx] @ np.asarray(sparse.values, dtype=np.float64)


def reconstruct_categorical(basis, sparse: SparseApproximation, original_norm: float) -> np.ndarray:
    """Binary reconstruction: rescale the sparse synthesis to the original
    scene's norm, round half up, clamp to {0, 1}."""
    if original_norm < 0:
        raise ArgumentError(f"original norm must be non-negative, got {original_norm}")
    y = synthesize(basis, sparse)
    norm = float(np.linalg.norm(y))
    if norm == 0.0:
        if original_norm == 0:
            return np.zeros(basis.n)
        raise DegenerateReconstructionError(
            "sparse synthesis is zero but the original scene is not; cannot rescale")
    alpha = original_norm / norm
    return np.clip(np.floor(alpha * y + 0.5), 0.0, 1.0)


def dominant_vectors(coeffs, count) -> list:
    """Indices of the ``count`` largest-magnitude coefficients, largest first."""
    coeffs = _coerce(coeffs)
    count = _check_k(count, coeffs.n, "count")
    return coeffs.ranking()[:count].tolist()


@dataclass(frozen=True)
class ErrorStats:
    thresholds: tuple
    fractions: tuple
    max_abs_error: float

    def to_dict(self):
        return {
            "max_abs_error": self.max_abs_error,
            "within": [{"threshold": t, "fraction": f} for t, f in zip(self.thresholds, self.fractions)],
        }


def reconstruction_error_stats(x, x_hat, thresholds=()) -> ErrorStats:
    x, x_hat = np.asarray(x, dtype=np.float64), np.asarray(x_hat, dtype=np.float64)
    if x.shape != x_hat.shape:
        raise ArgumentError(f"length mismatch: {x.shape} vs {x_hat.shape}")
    if any(t < 0 for t in thresholds):
        raise ArgumentError("thresholds must be non-negative")
    err = np.abs(x - x_hat)
    n = err.size
    fractions = tuple(float(np.count_nonzero(err <= t) / n) if n else 1.0 for t in thresholds)
    return ErrorStats(tuple(float(t) for t in thresholds), fractions, float(err.max()) if n else 0.0)


@dataclass(frozen=True)
class ClassificationStats:
    accuracy: float
    recall: Optional[float]

    def to_dict(self):
        return {"accuracy": self.accuracy, "recall": self.recall}


def classification_stats(x, x_hat) -> ClassificationStats:
    """Overall accuracy and recall of the positive (non-VFR) class."""
    x, x_hat = np.asarray(x, dtype=np.float64), np.asarray(x_hat, dtype=np.float64)
    if x.shape != x_hat.shape:
        raise ArgumentError(f"length mismatch: {x.shape} vs {x_hat.shape}")
    for arr in (x, x_hat):
        if not np.all((arr == 0) | (arr == 1)):
            raise ArgumentError("classification inputs must be binary")
    if x.size == 0:
        raise ArgumentError("classification inputs are empty")
    accuracy = float(np.count_nonzero(x == x_hat) / x.size)
    positives = np.count_nonzero(x == 1)
    recall = float(np.count_nonzero((x == 1) & (x_hat == 1)) / positives) if positives else None
    return ClassificationStats(accuracy, recall)


def ensemble_stats(coeff_list, k) -> EnsembleStats:
    if not len(coeff_list):
        raise ArgumentError("ensemble is empty")
    levels = [compressibility_level(c, k) for c in coeff_list]
    lowest = float(np.min(levels))
    return EnsembleStats(int(k), max(float(np.mean(levels)), lowest), lowest, len(levels))
