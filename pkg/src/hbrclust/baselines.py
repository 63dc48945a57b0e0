"""Baseline clusterers and the matched-accuracy metric."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .embedding import Embedding
from .errors import InputError
from .graph import Partition


@dataclass(frozen=True)
class AccuracyReport:
    """Best-bijection clustering accuracy with the matching and confusion."""

    accuracy: float
    matching: tuple[int, ...]  # matching[pred_cluster] = matched true label
    confusion: np.ndarray      # counts[pred_cluster, true_label]


def _unit_rows(x) -> tuple[np.ndarray, np.ndarray]:
    rows = x.X if isinstance(x, Embedding) else np.asarray(x, dtype=float)
    norms = np.linalg.norm(rows, axis=1)
    ok = norms > 0.0
    unit = np.zeros_like(rows)
    unit[ok] = rows[ok] / norms[ok, None]
    return unit, ok


def spherical_kmeans(
    x, m: int, seed: int = 0, restarts: int = 1,
    tol: float = 1e-8, max_iters: int = 300,
) -> Partition:
    """Lloyd iterations on unit-normalized rows under cosine distance.

    Means are initialized at m distinct data rows chosen at random; an
    emptied cluster is reseeded at a random row. The best of `restarts`
    runs by total cosine-distance objective wins. Rows with zero norm are
    assigned to cluster 0.
    """
    if m < 1:
        raise InputError(f"m must be positive, got {m}")
    unit, ok = _unit_rows(x)
    pool = np.flatnonzero(ok)
    if pool.size < m:
        raise InputError(f"need at least {m} nonzero rows, have {pool.size}")
    u = unit[pool]

    best_labels = None
    best_obj = np.inf
    for r in range(max(1, restarts)):
        rng = np.random.default_rng([seed, r])
        means = u[rng.choice(len(u), size=m, replace=False)].copy()
        labels = np.argmax(u @ means.T, axis=1)
        for _ in range(max_iters):
            new_means = np.empty_like(means)
            for j in range(m):
                members = u[labels == j]
                s = members.sum(axis=0) if len(members) else np.zeros(u.shape[1])
                ns = np.linalg.norm(s)
                if len(members) == 0 or ns == 0.0:
                    new_means[j] = u[rng.integers(len(u))]
                else:
                    new_means[j] = s / ns
            shift = float(np.abs(new_means - means).max())
            means = new_means
            labels = np.argmax(u @ means.T, axis=1)
            if shift < tol:
                break
        obj = float(np.sum(1.0 - (u * means[labels]).sum(axis=1)))
        if obj < best_obj:
            best_obj = obj
            best_labels = labels
            best_means = means

    occupied = np.unique(best_labels).size
    if occupied < m:
        warnings.warn(
            f"degenerate clustering: only {occupied} of {m} clusters occupied",
            stacklevel=2,
        )
    full = np.zeros(unit.shape[0], dtype=int)
    full[pool] = best_labels
    return Partition(labels=full, m=m)


def oracle_centroids(x, truth: Partition) -> Partition:
    """Assign by cosine distance to per-class means of normalized rows.

    The ground-truth labels fix the means; the returned labels show how
    well nearest-mean assignment can do on this embedding.
    """
    unit, ok = _unit_rows(x)
    if truth.n != unit.shape[0]:
        raise InputError(f"truth covers {truth.n} rows, embedding has {unit.shape[0]}")
    means = np.empty((truth.m, unit.shape[1]))
    for j in range(truth.m):
        members = unit[(truth.labels == j) & ok]
        if len(members) == 0:
            raise InputError(f"ground-truth class {j} is empty")
        mu = members.mean(axis=0)
        nmu = np.linalg.norm(mu)
        if nmu == 0.0:
            raise InputError(f"ground-truth class {j} has a zero mean direction")
        means[j] = mu / nmu
    return Partition(labels=np.argmax(unit @ means.T, axis=1), m=truth.m)


def matched_accuracy(pred: Partition, truth: Partition) -> AccuracyReport:
    """Accuracy under the best cluster-to-label bijection.

    The confusion matrix is padded square when the cluster counts differ;
    the assignment maximizing the matched count is found with the Hungarian
    method (scipy's linear_sum_assignment).
    """
    if pred.n != truth.n:
        raise InputError(f"partitions cover {pred.n} vs {truth.n} points")
    m = max(pred.m, truth.m)
    confusion = np.zeros((m, m), dtype=int)
    np.add.at(confusion, (pred.labels, truth.labels), 1)
    rows, cols = linear_sum_assignment(-confusion)
    matching = [0] * m
    for r, c in zip(rows, cols):
        matching[int(r)] = int(c)
    matched = int(confusion[rows, cols].sum())
    return AccuracyReport(
        accuracy=matched / pred.n,
        matching=tuple(matching),
        confusion=confusion,
    )
