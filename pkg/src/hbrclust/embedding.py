"""Spectral embedding: bottom eigenvectors of a Laplacian, scaled to sqrt(n).

With the sqrt(n) column scaling, rows of a graph with m exact components
collapse onto m orthogonal points (unnormalized / random-walk Laplacian) or
m orthogonal rays (symmetric normalized Laplacian).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, StructuralError
from .graph import LaplacianKind, SimilarityGraph, connected_components, laplacian
from .linalg import procrustes_rotation, sym_eig

ZERO_EIGENVALUE_RTOL = 1e-10


@dataclass(frozen=True)
class Embedding:
    """n x m matrix of embedded vertices, columns scaled to norm sqrt(n)."""

    X: np.ndarray
    kind: LaplacianKind
    eigenvalues: np.ndarray
    eigengap: float

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def m(self) -> int:
        return self.X.shape[1]


def spectral_embed(
    lap: np.ndarray, m: int, kind: LaplacianKind = LaplacianKind.UNNORMALIZED
) -> Embedding:
    """Embed via the m smallest eigenvectors of a symmetric Laplacian.

    Columns are rescaled to norm sqrt(n); the eigengap lambda_{m+1} -
    lambda_m is recorded (0 when m = n).
    """
    lap = np.asarray(lap, dtype=float)
    n = lap.shape[0] if lap.ndim == 2 else 0
    if not 1 <= m <= n:
        raise InputError(f"m must satisfy 1 <= m <= n = {n}, got {m}")
    eig = sym_eig(lap)
    x = eig.eigenvectors[:, :m] * np.sqrt(n)
    gap = float(eig.eigenvalues[m] - eig.eigenvalues[m - 1]) if m < n else 0.0
    return Embedding(X=x, kind=kind, eigenvalues=eig.eigenvalues[:m].copy(),
                     eigengap=gap)


def embed_graph(g: SimilarityGraph, m: int, kind: LaplacianKind) -> Embedding:
    """Build the requested Laplacian and embed.

    L_rw is not symmetric, so the random-walk embedding is realized through
    a symmetric solve: when the graph has at least m exact components the
    null spaces of L_rw and L coincide and the plain Laplacian's
    eigenvectors are used; otherwise the symmetric normalized Laplacian is
    decomposed instead, with kind still reported as RANDOM_WALK.
    """
    if kind is not LaplacianKind.RANDOM_WALK:
        return spectral_embed(laplacian(g, kind), m, kind)
    laplacian(g, kind)  # surface degenerate-degree errors up front
    if connected_components(g).m >= m:
        lap = laplacian(g, LaplacianKind.UNNORMALIZED)
    else:
        lap = laplacian(g, LaplacianKind.SYMMETRIC_NORMALIZED)
    emb = spectral_embed(lap, m, LaplacianKind.RANDOM_WALK)
    return emb


def _rows(x) -> np.ndarray:
    if isinstance(x, Embedding):
        return x.X
    return np.asarray(x, dtype=float)


def embedding_deviation(x, xt) -> float:
    """Procrustes-aligned operator-norm distance between two embeddings.

    Returns (1/sqrt(n)) * ||X R - Xt||_2 with R the orthogonal alignment
    from the SVD of X^T Xt. Zero for embeddings of the same subspace that
    differ only by a basis rotation.
    """
    a = _rows(x)
    b = _rows(xt)
    if a.shape != b.shape:
        raise StructuralError(f"shape mismatch: {a.shape} vs {b.shape}")
    r = procrustes_rotation(a, b)
    return float(np.linalg.norm(a @ r - b, 2) / np.sqrt(a.shape[0]))
