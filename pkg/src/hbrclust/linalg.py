"""Dense symmetric linear algebra helpers.

Everything here is deterministic for a fixed input: eigenvectors come out in
ascending eigenvalue order with a fixed sign convention, so downstream results
are reproducible bit-for-bit across runs.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .errors import StructuralError

SYMMETRY_RTOL = 1e-12


class SymEigResult(NamedTuple):
    """Full spectrum of a symmetric matrix.

    eigenvalues are ascending; eigenvectors[:, i] pairs with eigenvalues[i]
    and is sign-fixed so that its largest-magnitude entry is nonnegative.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _require_symmetric(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StructuralError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.abs(m).max())) if m.size else 1.0
    asym = float(np.abs(m - m.T).max()) if m.size else 0.0
    if asym > SYMMETRY_RTOL * scale:
        raise StructuralError(
            f"matrix is not symmetric: max |M - M^T| = {asym:.3e} "
            f"exceeds {SYMMETRY_RTOL:.0e} relative tolerance"
        )
    return m


def sym_eig(m: np.ndarray) -> SymEigResult:
    """Deterministic full eigendecomposition of a symmetric matrix.

    Eigenvalues ascending (stable order on ties), eigenvectors orthonormal
    columns. The +-q ambiguity is broken by making the largest-magnitude
    entry of each eigenvector nonnegative (first such entry on ties).
    """
    m = _require_symmetric(m)
    values, vectors = np.linalg.eigh(m)
    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    for i in range(vectors.shape[1]):
        col = vectors[:, i]
        j = int(np.argmax(np.abs(col)))
        if col[j] < 0:
            vectors[:, i] = -col
    return SymEigResult(values, vectors)


def procrustes_rotation(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Orthogonal R = U V^T from the SVD of A^T B, minimizing ||A R - B||."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise StructuralError(f"shape mismatch: {a.shape} vs {b.shape}")
    u, _, vt = np.linalg.svd(a.T @ b)
    return u @ vt


def project_orthogonal(u: np.ndarray, basis: Sequence[np.ndarray]) -> np.ndarray:
    """Project u onto the orthogonal complement of span(basis).

    Two Gram-Schmidt passes so the result is orthogonal to each basis vector
    to ~1e-15 relative even when the basis is only orthonormal to ~1e-8.
    """
    v = np.asarray(u, dtype=float).copy()
    vecs = [np.asarray(b, dtype=float) for b in basis]
    for b in vecs:
        if b.shape != v.shape:
            raise StructuralError(f"basis vector shape {b.shape} != {v.shape}")
    for _ in range(2):
        for b in vecs:
            v -= (v @ b) * b
    return v


def operator_norm(h: np.ndarray, max_iters: int = 200, tol: float = 1e-10) -> float:
    """Spectral norm of H by power iteration on H^T H.

    The start vector is a fixed seeded Gaussian, so the estimate is
    deterministic for a given matrix.
    """
    h = np.asarray(h, dtype=float)
    if h.ndim != 2:
        raise StructuralError(f"expected a matrix, got shape {h.shape}")
    if h.size == 0 or not np.any(h):
        return 0.0
    rng = np.random.default_rng(0)
    v = rng.standard_normal(h.shape[1])
    v /= np.linalg.norm(v)
    sigma_sq = 0.0
    for _ in range(max_iters):
        w = h.T @ (h @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        w /= nw
        if np.linalg.norm(w - v) < tol:
            v = w
            sigma_sq = nw
            break
        v = w
        sigma_sq = nw
    return float(np.sqrt(sigma_sq))
