"""Similarity graphs, graph Laplacians, and cut-cost metrics."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDegreeError, InputError, StructuralError


class LaplacianKind(enum.Enum):
    UNNORMALIZED = "unnormalized"
    SYMMETRIC_NORMALIZED = "sym"
    RANDOM_WALK = "rw"

    @classmethod
    def from_name(cls, name: str) -> "LaplacianKind":
        for kind in cls:
            if kind.value == name:
                return kind
        raise InputError(
            f"unknown laplacian kind {name!r}; expected one of "
            f"{[k.value for k in cls]}"
        )


@dataclass(frozen=True)
class SimilarityGraph:
    """Symmetric nonnegative adjacency with zero diagonal, plus degrees."""

    adjacency: np.ndarray
    degrees: np.ndarray

    @classmethod
    def from_adjacency(cls, adjacency: np.ndarray) -> "SimilarityGraph":
        a = np.asarray(adjacency, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise StructuralError(f"adjacency must be square, got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InputError("adjacency contains non-finite entries")
        scale = max(1.0, float(np.abs(a).max()))
        if float(np.abs(a - a.T).max()) > 1e-12 * scale:
            raise InputError("adjacency must be symmetric")
        if a.min() < 0:
            raise InputError("adjacency must be nonnegative")
        a = a.copy()
        np.fill_diagonal(a, 0.0)
        return cls(adjacency=a, degrees=a.sum(axis=1))

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]


@dataclass(frozen=True)
class Partition:
    """Per-vertex cluster labels in [0, m)."""

    labels: np.ndarray
    m: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=int)
        object.__setattr__(self, "labels", labels)
        if self.m < 1:
            raise InputError(f"m must be positive, got {self.m}")
        if labels.size and (labels.min() < 0 or labels.max() >= self.m):
            raise InputError(
                f"labels must lie in [0, {self.m}), got range "
                f"[{labels.min()}, {labels.max()}]"
            )

    @property
    def n(self) -> int:
        return self.labels.size

    def counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.m)


@dataclass(frozen=True)
class CutCosts:
    cut: float
    ratio_cut: float
    ncut: float
    has_empty_cluster: bool = field(default=False)


def gaussian_similarity(
    points: np.ndarray, alpha: float, radius: float | None = None
) -> SimilarityGraph:
    """Gaussian kernel graph a_ij = exp(-alpha * |p_i - p_j|^2), i != j.

    With a radius, entries at distance >= radius are zeroed (sparse local
    kernel as used for pixel-affinity graphs). The diagonal is always zero,
    so degrees count only off-diagonal mass.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise InputError(f"points must be an n x d array, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise InputError("points contain non-finite coordinates")
    if pts.shape[0] < 2:
        raise InputError("need at least 2 points")
    if not alpha > 0:
        raise InputError(f"alpha must be positive, got {alpha}")
    if radius is not None and not radius > 0:
        raise InputError(f"radius must be positive, got {radius}")
    diff = pts[:, None, :] - pts[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    a = np.exp(-alpha * d2)
    if radius is not None:
        a[d2 >= radius * radius] = 0.0
    np.fill_diagonal(a, 0.0)
    return SimilarityGraph(adjacency=a, degrees=a.sum(axis=1))


def laplacian(g: SimilarityGraph, kind: LaplacianKind) -> np.ndarray:
    """One of L = D - A, L_sym = D^-1/2 L D^-1/2, or L_rw = D^-1 L."""
    a = g.adjacency
    d = g.degrees
    lap = np.diag(d) - a
    if kind is LaplacianKind.UNNORMALIZED:
        return lap
    zero = np.flatnonzero(d <= 0.0)
    if zero.size:
        raise DegenerateDegreeError(int(zero[0]))
    if kind is LaplacianKind.SYMMETRIC_NORMALIZED:
        inv_sqrt = 1.0 / np.sqrt(d)
        # scaling matrix built first so the product stays exactly symmetric
        return lap * np.outer(inv_sqrt, inv_sqrt)
    if kind is LaplacianKind.RANDOM_WALK:
        return lap / d[:, None]
    raise InputError(f"unsupported laplacian kind {kind}")


def connected_components(g: SimilarityGraph) -> Partition:
    """Components of the positive-weight graph, labeled by discovery order."""
    n = g.n
    labels = np.full(n, -1, dtype=int)
    comp = 0
    for start in range(n):
        if labels[start] >= 0:
            continue
        stack = [start]
        labels[start] = comp
        while stack:
            v = stack.pop()
            for w in np.flatnonzero(g.adjacency[v] > 0.0):
                if labels[w] < 0:
                    labels[w] = comp
                    stack.append(int(w))
        comp += 1
    return Partition(labels=labels, m=comp)


def cut_costs(g: SimilarityGraph, p: Partition) -> CutCosts:
    """Plain, ratio, and normalized cut costs of a partition.

    cut(S, S^c) sums adjacency across the boundary; the ratio cost divides
    each term by |S_i| and the normalized cost by the cluster's degree
    volume. Empty clusters make the divided costs infinite (flagged).
    """
    if p.n != g.n:
        raise StructuralError(f"partition covers {p.n} vertices, graph has {g.n}")
    total_cut = 0.0
    ratio = 0.0
    ncut = 0.0
    has_empty = False
    for j in range(p.m):
        mask = p.labels == j
        size = int(mask.sum())
        cross = float(g.adjacency[mask][:, ~mask].sum())
        total_cut += cross
        if size == 0:
            has_empty = True
            ratio = np.inf
            ncut = np.inf
            continue
        vol = float(g.degrees[mask].sum())
        ratio += cross / size
        ncut += cross / vol if vol > 0 else np.inf
    return CutCosts(cut=total_cut, ratio_cut=ratio, ncut=ncut,
                    has_empty_cluster=has_empty)
