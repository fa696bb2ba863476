"""Full eigendecomposition of a graph Laplacian (the graph-spectral basis)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ArgumentError, NumericalError

ZERO_TOL = 1e-8
MAX_QL_ITERATIONS = 50


@dataclass(frozen=True)
class GraphSpectralBasis:
    """Ascending eigenvalues and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    site_fingerprint: bytes = b""
    threshold_mi: float = float("nan")

    def __post_init__(self):
        for arr in (self.eigenvalues, self.eigenvectors):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    def column(self, k: int) -> np.ndarray:
        return self.eigenvectors[:, k]


def _fix_signs(V: np.ndarray) -> np.ndarray:
    # Largest-magnitude entry of each column made positive; argmax returns
    # the lowest index among ties.
    if V.size == 0:
        return V
    idx = np.argmax(np.abs(V), axis=0)
    flip = V[idx, np.arange(V.shape[1])] < 0
    V[:, flip] *= -1.0
    return V


def _solve(H: np.ndarray, method: str):
    if method == "auto":
        method = "ql" if kernels.BACKEND == "cython" else "lapack"
    if method == "lapack":
        try:
            w, V = np.linalg.eigh(H)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"LAPACK eigensolver failed: {exc}") from exc
        return w, np.array(V, order="C")
    if method in ("ql", "ql-python"):
        solver = kernels.backends()["python"].symmetric_eigh if method == "ql-python" else kernels.symmetric_eigh
        w, V, failed = solver(H, MAX_QL_ITERATIONS)
        if failed >= 0:
            raise NumericalError(
                f"QL iteration did not converge for eigenvalue column {failed} "
                f"within {MAX_QL_ITERATIONS} iterations")
        return np.asarray(w), np.ascontiguousarray(V)
    raise ArgumentError(f"unknown eigensolver method {method!r}")


def eigendecompose(H, sites=None, threshold_mi=float("nan"), method="auto") -> GraphSpectralBasis:
    """Eigendecomposition of a symmetric Laplacian.

    ``method`` is ``"ql"`` (Householder tridiagonalization plus implicit QL,
    compiled when available), ``"ql-python"`` (same, uncompiled), ``"lapack"``
    (numpy) or ``"auto"``, which picks ``"ql"`` when the compiled core is
    present and ``"lapack"`` otherwise. Each column's largest-magnitude entry
    is made positive.
    """
    H = np.asarray(H, dtype=np.float64)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ArgumentError(f"Laplacian must be square, got shape {H.shape}")
    if not np.array_equal(H, H.T):
        raise ArgumentError("Laplacian must be exactly symmetric")
    w, V = _solve(H, method)
    order = np.argsort(w, kind="stable")
    if not np.array_equal(order, np.arange(len(w))):
        w, V = w[order], V[:, order]
    V = _fix_signs(np.array(V, dtype=np.float64, order="C"))
    fingerprint = sites.fingerprint if sites is not None else b""
    return GraphSpectralBasis(np.array(w, dtype=np.float64), V, fingerprint, float(threshold_mi))


def _component_count(H: np.ndarray) -> int:
    n = H.shape[0]
    seen = np.zeros(n, dtype=bool)
    count = 0
    for start in range(n):
        if seen[start]:
            continue
        count += 1
        stack = [start]
        seen[start] = True
        while stack:
            v = stack.pop()
            for w in np.flatnonzero(H[v] != 0):
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
    return count


@dataclass
class BasisDiagnostics:
    orthonormality_defect: float
    max_residual: float
    zero_eigenvalue_count: int
    component_count: int
    ascending: bool
    breaches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.breaches


def verify_basis(basis: GraphSpectralBasis, H) -> BasisDiagnostics:
    """Measure orthonormality, eigen-residuals, zero-eigenvalue count and ordering."""
    H = np.asarray(H, dtype=np.float64)
    n = basis.n
    if H.shape != (n, n) or basis.eigenvectors.shape != (n, n):
        raise ArgumentError(f"basis of size {n} does not match matrix of shape {H.shape}")
    w, V = basis.eigenvalues, basis.eigenvectors
    ortho = float(np.abs(V.T @ V - np.eye(n)).max()) if n else 0.0
    resid = float(np.linalg.norm(H @ V - V * w, axis=0).max()) if n else 0.0
    zeros = int(np.count_nonzero(w < ZERO_TOL))
    comps = _component_count(H)
    ascending = bool(np.all(np.diff(w) >= 0))
    scale = max(1.0, float(w.max())) if n else 1.0

    breaches = []
    if not ascending:
        breaches.append("eigenvalues not in ascending order")
    if ortho > 1e-8:
        breaches.append(f"orthonormality defect {ortho:.3g} > 1e-8")
    if resid > 1e-8 * scale:
        breaches.append(f"eigen-residual {resid:.3g} > {1e-8 * scale:.3g}")
    if n and (w.min() < -ZERO_TOL or w[0] > ZERO_TOL):
        breaches.append("smallest eigenvalue is not zero / spectrum not non-negative")
    if zeros != comps:
        breaches.append(f"{zeros} zero eigenvalues but {comps} connected components")
    return BasisDiagnostics(ortho, resid, zeros, comps, ascending, breaches)
