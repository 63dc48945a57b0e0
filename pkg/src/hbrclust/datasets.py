"""Data loading, normalization, and the synthetic benchmark generators."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .graph import Partition, SimilarityGraph


@dataclass(frozen=True)
class LabeledDataset:
    points: np.ndarray
    labels: Partition | None
    feature_names: tuple[str, ...]

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


def load_csv(path, label_column: str | None = None,
             has_header: bool = True) -> LabeledDataset:
    """Read a rectangular numeric CSV, optionally splitting off a label column.

    Label values may be arbitrary strings; they are mapped to indices in
    order of first appearance.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]
    if not rows:
        raise InputError(f"{path}: empty file")
    if has_header:
        header = [h.strip() for h in rows[0]]
        rows = rows[1:]
        if not rows:
            raise InputError(f"{path}: header but no data rows")
    else:
        header = [f"col{i}" for i in range(len(rows[0]))]
    width = len(header)
    for i, r in enumerate(rows):
        if len(r) != width:
            raise InputError(f"{path}: row {i + 1} has {len(r)} fields, expected {width}")
    label_idx = None
    if label_column is not None:
        if label_column not in header:
            raise InputError(
                f"{path}: no column named {label_column!r}; available: {header}"
            )
        label_idx = header.index(label_column)
    feature_names = tuple(h for i, h in enumerate(header) if i != label_idx)
    points = np.empty((len(rows), width - (label_idx is not None)))
    raw_labels = []
    for i, r in enumerate(rows):
        col = 0
        for j, cell in enumerate(r):
            if j == label_idx:
                raw_labels.append(cell.strip())
                continue
            try:
                points[i, col] = float(cell)
            except ValueError as exc:
                raise InputError(
                    f"{path}: row {i + 1}, column {header[j]!r}: "
                    f"cannot parse {cell!r} as a number"
                ) from exc
            col += 1
    labels = None
    if label_idx is not None:
        seen: dict[str, int] = {}
        idx = [seen.setdefault(v, len(seen)) for v in raw_labels]
        labels = Partition(labels=np.array(idx), m=len(seen))
    return LabeledDataset(points=points, labels=labels, feature_names=feature_names)


def save_csv(ds: LabeledDataset, path) -> None:
    """Write features (and a trailing `label` column when present) as CSV."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = list(ds.feature_names)
        if ds.labels is not None:
            header.append("label")
        writer.writerow(header)
        for i in range(ds.n):
            row = [repr(float(v)) for v in ds.points[i]]
            if ds.labels is not None:
                row.append(str(int(ds.labels.labels[i])))
            writer.writerow(row)


def save_adjacency_csv(g: SimilarityGraph, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for row in g.adjacency:
            writer.writerow([repr(float(v)) for v in row])


def normalize_unit_std(ds: LabeledDataset) -> LabeledDataset:
    """Divide every feature by its sample standard deviation.

    Zero-variance features carry no information after scaling and are
    dropped with a warning.
    """
    if ds.n < 2:
        raise InputError("need at least 2 points to estimate a standard deviation")
    sd = ds.points.std(axis=0, ddof=1)
    keep = sd > 0.0
    if not keep.any():
        raise InputError("all features have zero variance")
    if not keep.all():
        dropped = [ds.feature_names[i] for i in np.flatnonzero(~keep)]
        warnings.warn(f"dropping zero-variance features: {dropped}", stacklevel=2)
    return LabeledDataset(
        points=ds.points[:, keep] / sd[keep],
        labels=ds.labels,
        feature_names=tuple(np.asarray(ds.feature_names)[keep]),
    )


CIRCLE_RADII = (1.0, 3.0, 5.0)
CIRCLE_COUNTS = (200, 350, 700)
CIRCLE_RADIAL_JITTER = 0.1


def gen_circles(seed: int) -> LabeledDataset:
    """Three concentric rings (radii 1/3/5 with 200/350/700 points).

    Angles are uniform; each radius is jittered multiplicatively by
    uniform(-10%, +10%).
    """
    rng = np.random.default_rng(seed)
    pts = []
    labels = []
    for label, (r, count) in enumerate(zip(CIRCLE_RADII, CIRCLE_COUNTS)):
        theta = rng.uniform(0.0, 2.0 * np.pi, count)
        eps = rng.uniform(-CIRCLE_RADIAL_JITTER, CIRCLE_RADIAL_JITTER, count)
        rad = r * (1.0 + eps)
        pts.append(np.column_stack([rad * np.cos(theta), rad * np.sin(theta)]))
        labels.extend([label] * count)
    return LabeledDataset(
        points=np.vstack(pts),
        labels=Partition(labels=np.array(labels), m=3),
        feature_names=("x", "y"),
    )


SBM_SMALL_BLOCK = 10
SBM_LARGE_BLOCK = 1000
SBM_SMALL_WEIGHT = 0.1
SBM_LARGE_WEIGHT = 0.001
SBM_LARGE_DENSITY = 0.05
SBM_NOISE_HIGH = 7e-4


def gen_sbm(seed: int) -> tuple[SimilarityGraph, Partition]:
    """Imbalanced three-block similarity graph (10 + 10 + 1000 vertices).

    The two small blocks are complete with weight 0.1; the large block is
    ~95% sparse with nonzero weights 0.001 at random symmetric positions.
    A dense symmetric uniform(0, 7e-4) perturbation connects everything;
    the scale sits safely below the spectral gap of the clean Laplacian
    while spreading the embedded large-block cloud enough that splitting it
    is what a cosine k-means objective actually prefers.
    """
    rng = np.random.default_rng(seed)
    n = 2 * SBM_SMALL_BLOCK + SBM_LARGE_BLOCK
    upper = np.zeros((n, n))
    b = SBM_SMALL_BLOCK
    upper[0:b, 0:b] = np.triu(np.full((b, b), SBM_SMALL_WEIGHT), 1)
    upper[b:2 * b, b:2 * b] = np.triu(np.full((b, b), SBM_SMALL_WEIGHT), 1)
    iu = np.triu_indices(SBM_LARGE_BLOCK, 1)
    mask = rng.random(iu[0].size) < SBM_LARGE_DENSITY
    block = np.zeros((SBM_LARGE_BLOCK, SBM_LARGE_BLOCK))
    block[iu[0][mask], iu[1][mask]] = SBM_LARGE_WEIGHT
    upper[2 * b:, 2 * b:] = block
    ju = np.triu_indices(n, 1)
    noise = np.zeros((n, n))
    noise[ju] = rng.uniform(0.0, SBM_NOISE_HIGH, ju[0].size)
    upper += noise
    adjacency = upper + upper.T
    labels = np.array([0] * b + [1] * b + [2] * SBM_LARGE_BLOCK)
    return (
        SimilarityGraph.from_adjacency(adjacency),
        Partition(labels=labels, m=3),
    )
