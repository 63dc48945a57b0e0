"""Numerical verification of the maxima structure behind sphere contrasts.

This module holds the pieces needed to check, on concrete instances, that:

* weighted-basis objectives F(u) = sum_i alpha_i g(beta_i |<u, Z_i>|) have
  their local maxima exactly at the hidden directions +-Z_i when the
  contrast is admissible (multistart enumeration + certification, plus a
  dense-grid oracle in dimensions <= 3);
* the admissibility conditions are sharp (explicit counterexample
  constructions when either condition fails);
* first/second derivatives in the radial-projection chart of the sphere
  match their ambient-space formulas;
* the maxima structure survives perturbations of the graph Laplacian, with
  the embedding deviation obeying the 2|H|/(gap - |H|) bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .contrasts import Contrast, EmpiricalObjective
from .embedding import embedding_deviation, spectral_embed
from .errors import InputError
from .graph import LaplacianKind, SimilarityGraph, connected_components, laplacian
from .hbr import ascend
from .linalg import operator_norm

FIRST_ORDER_TOL = 1e-6
SECOND_ORDER_TOL = 1e-6
PROBE_RADIUS = 1e-4
DEDUP_ANGLE = 1e-3


# ---------------------------------------------------------------------------
# objectives

class WeightedBasisObjective:
    """F(u) = sum_i alpha_i g(beta_i |<u, Z_i>|) for an orthonormal basis Z."""

    def __init__(self, directions: np.ndarray, alpha: np.ndarray,
                 beta: np.ndarray, contrast: Contrast):
        z = np.asarray(directions, dtype=float)
        alpha = np.asarray(alpha, dtype=float)
        beta = np.asarray(beta, dtype=float)
        m = z.shape[0]
        if z.shape != (m, m):
            raise InputError(f"directions must be square (rows Z_i), got {z.shape}")
        if float(np.abs(z @ z.T - np.eye(m)).max()) > 1e-10:
            raise InputError("directions must be orthonormal to 1e-10")
        if alpha.shape != (m,) or beta.shape != (m,):
            raise InputError("alpha and beta must have one entry per direction")
        if np.any(alpha <= 0) or np.any(beta <= 0):
            raise InputError("alpha and beta must be strictly positive")
        self.directions = z
        self.alpha = alpha
        self.beta = beta
        self.contrast = contrast

    @property
    def dim(self) -> int:
        return self.directions.shape[0]

    def value(self, u: np.ndarray) -> float:
        p = self.directions @ u
        return float(np.sum(self.alpha * self.contrast.g(self.beta * np.abs(p))))

    def gradient(self, u: np.ndarray, zero_tol: float = 0.0) -> np.ndarray:
        p = self.directions @ u
        dead = np.abs(p) <= zero_tol if zero_tol > 0.0 else (p == 0.0)
        w = np.where(
            dead, 0.0,
            self.alpha * self.beta * self.contrast.dg(self.beta * np.abs(p))
            * np.sign(p),
        )
        return self.directions.T @ w

    def hessian(self, u: np.ndarray) -> np.ndarray:
        p = self.directions @ u
        w = self.alpha * self.beta**2 * self.contrast.d2g(self.beta * np.abs(p))
        return (self.directions.T * w) @ self.directions

    def hidden_coordinates(self, u: np.ndarray) -> np.ndarray:
        return self.directions @ np.asarray(u, dtype=float)

    def kink_normals(self, u: np.ndarray, angle_tol: float) -> np.ndarray:
        """Normals of the kink hyperplanes {<v, Z_i> = 0} passing near u."""
        if not self.contrast.kinked:
            return np.zeros((0, self.dim))
        near = np.abs(self.directions @ u) < math.sin(min(angle_tol, math.pi / 2))
        return self.directions[near]


def random_weighted_basis(
    m: int, contrast: Contrast, seed,
    alpha_range=(0.5, 2.0), beta_range=(0.5, 2.0),
) -> WeightedBasisObjective:
    """Random orthonormal basis with log-uniform-ish positive weights."""
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((m, m)))
    alpha = rng.uniform(*alpha_range, size=m)
    beta = rng.uniform(*beta_range, size=m)
    return WeightedBasisObjective(q.T, alpha, beta, contrast)


def spectral_weights_objective(
    weights: np.ndarray, contrast: Contrast, directions: np.ndarray | None = None
) -> WeightedBasisObjective:
    """Objective with the clustering weights alpha_i = w_i, beta_i = 1/sqrt(w_i)."""
    w = np.asarray(weights, dtype=float)
    if directions is None:
        directions = np.eye(w.size)
    return WeightedBasisObjective(directions, w, 1.0 / np.sqrt(w), contrast)


class SimplexObjective:
    """Push-forward H(t) = sum_i alpha_i g(beta_i sqrt(t_i)) on the simplex.

    Composing with the squaring map psi(u)_i = <u, Z_i>^2 recovers the
    sphere objective exactly.
    """

    def __init__(self, wb: WeightedBasisObjective):
        self.wb = wb

    def value(self, t: np.ndarray) -> float:
        t = np.asarray(t, dtype=float)
        if np.any(t < -1e-12):
            raise InputError("simplex coordinates must be nonnegative")
        return float(np.sum(
            self.wb.alpha * self.wb.contrast.g(self.wb.beta * np.sqrt(np.maximum(t, 0.0)))
        ))

    def squash(self, u: np.ndarray) -> np.ndarray:
        """psi(u): squared hidden coordinates, a point of the simplex."""
        return self.wb.hidden_coordinates(u) ** 2


# ---------------------------------------------------------------------------
# radial-projection chart

@dataclass(frozen=True)
class SphereChart:
    """Radial projection of the hemisphere around v onto its tangent plane.

    chart(u)_i = <u, p_i> / <u, v> for the orthonormal tangent frame rows
    p_i; the inverse renormalizes v + sum x_i p_i back to the sphere.
    """

    v: np.ndarray
    frame: np.ndarray  # (m-1, m), rows orthonormal and orthogonal to v

    def chart(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        denom = float(u @ self.v)
        if denom <= 0:
            raise InputError("point is outside the chart's open hemisphere")
        return (self.frame @ u) / denom

    def inverse(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        u = self.v + self.frame.T @ x
        return u / np.linalg.norm(u)


def chart_at(v: np.ndarray) -> SphereChart:
    """Deterministic orthonormal tangent frame at a unit vector v."""
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    m = v.size
    drop = int(np.argmax(np.abs(v)))
    frame = []
    for i in range(m):
        if i == drop:
            continue
        e = np.zeros(m)
        e[i] = 1.0
        for _ in range(2):
            e -= (e @ v) * v
            for b in frame:
                e -= (e @ b) * b
        e /= np.linalg.norm(e)
        frame.append(e)
    return SphereChart(v=v, frame=np.array(frame) if frame else np.zeros((0, m)))


def chart_derivatives(chart: SphereChart, f) -> tuple[np.ndarray, np.ndarray]:
    """Gradient and Hessian of f composed with the chart inverse, at the base.

    Assembled from the ambient derivatives: the chart gradient is the frame
    projection of the ambient gradient, and the chart Hessian subtracts the
    radial derivative times the identity from the frame-projected ambient
    Hessian. f must expose gradient(u) and hessian(u).
    """
    g_amb = np.asarray(f.gradient(chart.v), dtype=float)
    h_amb = np.asarray(f.hessian(chart.v), dtype=float)
    p = chart.frame
    grad = p @ g_amb
    hess = p @ h_amb @ p.T - float(g_amb @ chart.v) * np.eye(p.shape[0])
    return grad, hess


def chart_fd_derivatives(chart: SphereChart, f, step: float = 1e-4):
    """Central finite differences of f through the chart at the base point.

    Unlike the ambient formula this sees one-sided kinks, which is what the
    certification of non-smooth contrast maxima needs.
    """
    k = chart.frame.shape[0]

    def phi(x):
        return f.value(chart.inverse(x))

    f0 = phi(np.zeros(k))
    grad = np.zeros(k)
    hess = np.zeros((k, k))
    for i in range(k):
        e = np.zeros(k)
        e[i] = step
        fp = phi(e)
        fm = phi(-e)
        grad[i] = (fp - fm) / (2 * step)
        hess[i, i] = (fp - 2 * f0 + fm) / step**2
    for i in range(k):
        for j in range(i + 1, k):
            ei = np.zeros(k)
            ej = np.zeros(k)
            ei[i] = step
            ej[j] = step
            val = (phi(ei + ej) - phi(ei - ej) - phi(-ei + ej) + phi(-ei - ej)) \
                / (4 * step**2)
            hess[i, j] = hess[j, i] = val
    return f0, grad, hess


# ---------------------------------------------------------------------------
# maxima enumeration

@dataclass
class MaximaCertificate:
    """Outcome of a multistart enumeration of sphere maxima.

    maxima holds one canonical-sign representative per certified class;
    spurious lists indices of certified maxima farther than the matching
    tolerance from every reference direction (empty without a reference).
    """

    maxima: np.ndarray
    values: list[float]
    hits: list[int]
    angular_errors: list[float] | None
    spurious: list[int]
    unconverged_starts: int
    rejected_points: int
    degenerate: bool
    starts: int = 0

    @property
    def n_classes(self) -> int:
        return self.maxima.shape[0] if self.maxima.size else 0


def _canonical_sign(u: np.ndarray) -> np.ndarray:
    j = int(np.argmax(np.abs(u)))
    return -u if u[j] < 0 else u


def _angle_mod_sign(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.arccos(min(1.0, abs(float(a @ b)))))


def refute_candidate(obj, u: np.ndarray, scale: float = 1e-2) -> bool:
    """Find a strictly better point near u by a kink-aware value search.

    Probes tangent-frame directions and, when the objective reports active
    kink hyperplanes through u, their projections onto the intersection of
    those hyperplanes. The on-ridge directions are what expose ridge
    saddles of non-smooth contrasts, whose improving cone is too thin for
    generic probes. Returns True when an improvement exists (u is not a
    local maximum at this resolution).
    """
    f0 = obj.value(u)
    chart = chart_at(u)
    dirs = [row for row in chart.frame]
    if hasattr(obj, "kink_normals"):
        normals = obj.kink_normals(u, angle_tol=3.0 * scale)
        if len(normals):
            for row in chart.frame:
                t = row.copy()
                for _ in range(2):
                    for nrm in normals:
                        t = t - (t @ nrm) * nrm
                    t -= (t @ u) * u
                nt = np.linalg.norm(t)
                if nt > 1e-3:
                    dirs.append(t / nt)
    radii = np.geomspace(scale / 300.0, 3.0 * scale, 12)
    margin = 1e-12 * (1.0 + abs(f0))
    for t in dirs:
        for r in radii:
            for s in (1.0, -1.0):
                v = u * math.cos(s * r) + t * math.sin(s * r)
                v /= np.linalg.norm(v)
                if obj.value(v) > f0 + margin:
                    return True
    return False


def _certify_maximum(obj, u: np.ndarray) -> bool:
    """First-order, second-order, and direct-probe test of a candidate."""
    try:
        # dead zone: a point within ~1e-7 of a kink counts as on the kink
        grad = obj.gradient(u, zero_tol=1e-7)
    except TypeError:
        grad = obj.gradient(u)
    tangential = grad - u * (u @ grad)
    if np.linalg.norm(tangential) >= FIRST_ORDER_TOL:
        return False
    chart = chart_at(u)
    if chart.frame.shape[0] == 0:
        return True
    f0, _, hess = chart_fd_derivatives(chart, obj, step=PROBE_RADIUS)
    top = float(np.linalg.eigvalsh(0.5 * (hess + hess.T)).max())
    if top >= SECOND_ORDER_TOL:
        return False
    for i in range(chart.frame.shape[0]):
        e = np.zeros(chart.frame.shape[0])
        e[i] = PROBE_RADIUS
        if obj.value(chart.inverse(e)) > f0 or obj.value(chart.inverse(-e)) > f0:
            return False
    return not refute_candidate(obj, u)


def enumerate_maxima(
    obj, starts: int, seed, reference: np.ndarray | None = None,
    spurious_tol: float = DEDUP_ANGLE, max_iters: int = 10_000,
    tol: float = 1e-8,
) -> MaximaCertificate:
    """Multistart projected gradient ascent without deflation.

    Converged endpoints are deduplicated modulo sign at a 1e-3 angular
    tolerance and certified by first/second-order chart conditions plus
    axis probes. With a reference basis (rows Z_i) each certified class is
    matched to its nearest +-Z_i and flagged spurious beyond spurious_tol.
    """
    m = obj.dim
    if starts < 50 * m:
        raise InputError(f"starts must be at least 50*m = {50 * m}, got {starts}")
    classes: list[np.ndarray] = []
    values: list[float] = []
    hits: list[int] = []
    endpoint_values = []
    unconverged = 0
    for k in range(starts):
        rng = np.random.default_rng([_seed_key(seed), k])
        u = rng.standard_normal(m)
        u /= np.linalg.norm(u)
        u, f, _, ok = ascend(obj, u, (), tol=tol, max_iters=max_iters,
                             global_first_sweep=False)
        endpoint_values.append(f)
        if not ok:
            unconverged += 1
            continue
        u = _canonical_sign(u)
        for i, c in enumerate(classes):
            if _angle_mod_sign(u, c) < DEDUP_ANGLE:
                hits[i] += 1
                break
        else:
            classes.append(u)
            values.append(f)
            hits.append(1)

    certified = [i for i, c in enumerate(classes) if _certify_maximum(obj, c)]
    rejected = len(classes) - len(certified)
    maxima = np.array([classes[i] for i in certified]) if certified else \
        np.zeros((0, m))
    values = [values[i] for i in certified]
    hits = [hits[i] for i in certified]

    spread = (max(endpoint_values) - min(endpoint_values)) if endpoint_values else 0.0
    flat = spread < 1e-10 * (1.0 + abs(max(endpoint_values, default=0.0)))
    degenerate = flat and len(certified) > 2 * m

    angular = None
    spurious: list[int] = []
    if reference is not None and maxima.size:
        ref = np.asarray(reference, dtype=float)
        angular = [
            min(_angle_mod_sign(c, z) for z in ref) for c in maxima
        ]
        spurious = [i for i, a in enumerate(angular) if a > spurious_tol]
    return MaximaCertificate(
        maxima=maxima, values=values, hits=hits, angular_errors=angular,
        spurious=spurious, unconverged_starts=unconverged,
        rejected_points=rejected, degenerate=degenerate, starts=starts,
    )


def _seed_key(seed):
    if isinstance(seed, (list, tuple)):
        return list(seed)
    return int(seed)


def enumerate_until_stable(
    obj, seed, initial_starts: int | None = None, max_doublings: int = 4,
    reference: np.ndarray | None = None, spurious_tol: float = DEDUP_ANGLE,
) -> MaximaCertificate:
    """Double the start count until the found class set stabilizes twice."""
    starts = initial_starts or 50 * obj.dim
    prev = None
    stable = 0
    cert = None
    for _ in range(max_doublings + 1):
        cert = enumerate_maxima(obj, starts, seed, reference=reference,
                                spurious_tol=spurious_tol)
        key = cert.n_classes
        if prev is not None and key == prev:
            stable += 1
            if stable >= 2:
                break
        else:
            stable = 0
        prev = key
        starts *= 2
    return cert


def grid_scan_maxima(obj, n_points: int = 100_000,
                     neighbor_factor: float = 2.0) -> np.ndarray:
    """Brute-force local maxima of a sphere objective on a dense grid.

    Usable for dimensions 1-3 only; serves as an enumeration oracle
    independent of any ascent path. Returns canonical-sign candidate
    directions (clustered duplicates removed).
    """
    m = obj.dim
    if m == 1:
        return np.array([[1.0]])
    if m == 2:
        thetas = np.linspace(0.0, math.pi, n_points, endpoint=False)
        pts = np.column_stack([np.cos(thetas), np.sin(thetas)])
        vals = obj.value_many(pts.T) if hasattr(obj, "value_many") else \
            np.array([obj.value(p) for p in pts])
        up = np.roll(vals, -1)
        down = np.roll(vals, 1)
        keep = (vals >= up) & (vals >= down)
        cands = pts[keep]
        return _dedup_directions(cands, 4.0 * math.pi / n_points)
    if m == 3:
        # Fibonacci sphere
        i = np.arange(n_points)
        phi = math.pi * (3.0 - math.sqrt(5.0))
        z = 1.0 - 2.0 * (i + 0.5) / n_points
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        pts = np.column_stack([r * np.cos(phi * i), r * np.sin(phi * i), z])
        vals = np.array([obj.value(p) for p in pts])
        from scipy.spatial import cKDTree

        spacing = math.sqrt(4.0 * math.pi / n_points)
        chord = 2.0 * math.sin(min(math.pi / 2, neighbor_factor * spacing) / 2.0)
        # F(u) = F(-u): compare against neighbors of the point and its antipode
        tree = cKDTree(np.vstack([pts, -pts]))
        vals2 = np.concatenate([vals, vals])
        keep = np.zeros(n_points, dtype=bool)
        for idx in range(n_points):
            nbrs = tree.query_ball_point(pts[idx], chord)
            if vals[idx] >= vals2[nbrs].max():
                keep[idx] = True
        cands = pts[keep]
        return _dedup_directions(cands, 3.0 * spacing)
    raise InputError(f"grid scan supports dimensions 1-3, got {m}")


def _dedup_directions(cands: np.ndarray, tol_angle: float) -> np.ndarray:
    out: list[np.ndarray] = []
    for c in cands:
        c = _canonical_sign(c / np.linalg.norm(c))
        if all(_angle_mod_sign(c, o) > tol_angle for o in out):
            out.append(c)
    return np.array(out) if out else np.zeros((0, cands.shape[1]))


# ---------------------------------------------------------------------------
# necessity counterexamples

def sqrt_contrast() -> Contrast:
    """g(t) = sqrt(t): h(x) = x^(1/4) is strictly concave, violating P1."""
    return Contrast(
        name="sqrt",
        g=lambda t: np.sqrt(np.asarray(t, dtype=float)),
        dg=lambda t: 0.5 / np.sqrt(np.maximum(np.asarray(t, dtype=float), 1e-300)),
        d2g=lambda t: -0.25 * np.maximum(np.asarray(t, dtype=float), 1e-300) ** -1.5,
        p1=False,
        p2=False,
    )


def quartic_plus_square() -> Contrast:
    """g(t) = t^4 + t^2: h(x) = x^2 + x is convex with h'(0) = 1 > 0."""
    return Contrast(
        name="t4+t2",
        g=lambda t: np.asarray(t, dtype=float) ** 4 + np.asarray(t, dtype=float) ** 2,
        dg=lambda t: 4.0 * np.asarray(t, dtype=float) ** 3
        + 2.0 * np.asarray(t, dtype=float),
        d2g=lambda t: 12.0 * np.asarray(t, dtype=float) ** 2 + 2.0,
        p1=True,
        p2=False,
    )


def quartic_minus_square() -> Contrast:
    """g(t) = t^4 - t^2: h(x) = x^2 - x is convex with h'(0) = -1 < 0."""
    return Contrast(
        name="t4-t2",
        g=lambda t: np.asarray(t, dtype=float) ** 4 - np.asarray(t, dtype=float) ** 2,
        dg=lambda t: 4.0 * np.asarray(t, dtype=float) ** 3
        - 2.0 * np.asarray(t, dtype=float),
        d2g=lambda t: 12.0 * np.asarray(t, dtype=float) ** 2 - 2.0,
        p1=True,
        p2=False,
    )


@dataclass
class ConvexityNecessityResult:
    verdict: str           # "strict_max" | "plateau" | "p1_holds"
    t: float | None
    alpha: np.ndarray | None
    beta: np.ndarray | None
    point: np.ndarray | None
    margin: float | None   # value above the best neighbor at the probe radius


def necessity_counterexample_convexity(
    c: Contrast, ts: np.ndarray | None = None
) -> ConvexityNecessityResult:
    """Construct the two-direction counterexample where g(sqrt x) bends down.

    At a point t with h''(t) < 0, equal weights 1/(2t) make the diagonal
    (1, 1)/sqrt(2) a strict local maximum; where h is affine the diagonal
    sits on a plateau instead.
    """
    if ts is None:
        ts = np.linspace(0.05, 5.0, 500)
    h2 = np.asarray(c.h2(ts), dtype=float)
    neg = np.flatnonzero(h2 < -1e-10)
    flat = np.flatnonzero(np.abs(h2) <= 1e-12)
    if neg.size:
        t = float(ts[int(neg[0])])
        v = 1.0 / (2.0 * t)
        alpha = np.array([v, v])
        beta = 1.0 / np.sqrt(alpha)
        wb = WeightedBasisObjective(np.eye(2), alpha, beta, c)
        point = np.array([1.0, 1.0]) / math.sqrt(2.0)
        f0 = wb.value(point)
        rot = PROBE_RADIUS
        nb = max(
            wb.value(np.array([math.cos(math.pi / 4 + rot),
                               math.sin(math.pi / 4 + rot)])),
            wb.value(np.array([math.cos(math.pi / 4 - rot),
                               math.sin(math.pi / 4 - rot)])),
        )
        margin = f0 - nb
        verdict = "strict_max" if margin > 0 else "p1_holds"
        return ConvexityNecessityResult(verdict, t, alpha, beta, point, margin)
    if flat.size:
        t = float(ts[int(flat[0])])
        v = 1.0 / (2.0 * t)
        # H'(x) = h'(x/v) - h'((1-x)/v): identically zero around 1/2 on a plateau
        eps = 1e-3
        d_plus = float(c.h1((0.5 + eps) / v) - c.h1((0.5 - eps) / v))
        if abs(d_plus) < 1e-10:
            return ConvexityNecessityResult(
                "plateau", t, np.array([v, v]), 1.0 / np.sqrt([v, v]),
                np.array([1.0, 1.0]) / math.sqrt(2.0), 0.0,
            )
    return ConvexityNecessityResult("p1_holds", None, None, None, None, None)


@dataclass
class P2NecessityResult:
    hprime0: float
    case: str              # "positive" | "negative"
    alpha: np.ndarray
    beta: np.ndarray
    improvement: float     # best neighbor value minus the value at e1 (> 0)
    verdict: str           # "not_maximal"


def _origin_derivative(c: Contrast) -> float:
    """h'(0+) for a contrast known to fail the origin condition."""
    from .contrasts import classify_origin_derivative

    kind, limit = classify_origin_derivative(c)
    if kind in ("zero", "neg_inf"):
        raise InputError(f"h'(0+) is {kind}: the origin condition holds")
    if kind == "ambiguous":
        raise InputError("h'(0+) classification is ambiguous on this contrast")
    return limit


def necessity_counterexample_p2(
    c: Contrast, m: int = 2, betas: np.ndarray | None = None
) -> P2NecessityResult:
    """Weights that stop e1 from being a local maximum when h'(0+) != 0, -inf.

    Case h'(0) > 0: equal scale beta, first weight h'(0) / h'(beta^2).
    Case h'(0) < 0: beta^2 = delta/2 where h' stays below h'(0)/2 on
    (0, delta], first weight 2. Both turn e1 into a local minimum, which
    the probe step at radius 1e-4 certifies by a strict improvement.
    """
    q = _origin_derivative(c)
    if q > 0:
        if betas is None:
            betas = np.geomspace(0.5, 8.0, 24)
        for b in betas:
            big_m = float(c.h1(b * b))
            if not np.isfinite(big_m) or big_m <= q:
                continue
            alpha = np.concatenate([[q / big_m], np.ones(m - 1)])
            beta = np.full(m, float(b))
            result = _certify_not_max(c, alpha, beta)
            if result is not None:
                return P2NecessityResult(q, "positive", alpha, beta, result,
                                         "not_maximal")
        raise InputError("no scale in the scan certified the construction")
    # q < 0: find delta with h'(x) < q/2 for x in (0, delta]
    xs = np.geomspace(1e-10, 10.0, 400)
    below = np.asarray(c.h1(xs), dtype=float) < q / 2.0
    if not below.any():
        raise InputError("no scale in the scan certified the construction")
    delta = float(xs[int(np.flatnonzero(below)[-1])])
    beta = np.full(m, math.sqrt(delta / 2.0))
    alpha = np.concatenate([[2.0], np.ones(m - 1)])
    result = _certify_not_max(c, alpha, beta)
    if result is None:
        raise InputError("construction failed to certify e1 as non-maximal")
    return P2NecessityResult(q, "negative", alpha, beta, result, "not_maximal")


def _certify_not_max(c: Contrast, alpha, beta) -> float | None:
    m = len(alpha)
    wb = WeightedBasisObjective(np.eye(m), alpha, beta, c)
    e1 = np.zeros(m)
    e1[0] = 1.0
    f0 = wb.value(e1)
    chart = chart_at(e1)
    best = -np.inf
    for i in range(chart.frame.shape[0]):
        e = np.zeros(chart.frame.shape[0])
        e[i] = PROBE_RADIUS
        best = max(best, wb.value(chart.inverse(e)), wb.value(chart.inverse(-e)))
    gain = best - f0
    return gain if gain > 0 else None


# ---------------------------------------------------------------------------
# perturbation experiments

@dataclass
class PerturbationTrial:
    h_norm: float
    deviation: float
    bound: float
    ratio: float
    n_classes: int
    localization: float
    n_spurious: int
    skipped: bool = False
    reason: str = ""


@dataclass
class PerturbationReport:
    eigengap: float
    noise_scale: float
    trials: list[PerturbationTrial] = field(default_factory=list)

    @property
    def max_ratio(self) -> float:
        done = [t.ratio for t in self.trials if not t.skipped]
        return max(done) if done else 0.0

    @property
    def any_spurious(self) -> bool:
        return any(t.n_spurious > 0 for t in self.trials if not t.skipped)

    @property
    def max_localization(self) -> float:
        done = [t.localization for t in self.trials if not t.skipped]
        return max(done) if done else 0.0


def clean_directions(g: SimilarityGraph, m: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Embedding, hidden directions, and eigengap of an exactly-clustered graph."""
    comps = connected_components(g)
    if comps.m != m:
        raise InputError(f"graph has {comps.m} components, expected {m}")
    emb = spectral_embed(laplacian(g, LaplacianKind.UNNORMALIZED), m)
    z = np.empty((m, m))
    for j in range(m):
        row = emb.X[int(np.flatnonzero(comps.labels == j)[0])]
        z[j] = row / np.linalg.norm(row)
    return emb.X, z, emb.eigengap


def perturbation_experiment(
    g: SimilarityGraph, m: int, noise_scale: float, trials: int, seed: int,
    contrast: Contrast | None = None, starts: int | None = None,
    spurious_tol: float = 0.5,
) -> PerturbationReport:
    """Check embedding deviation and maxima localization under noise.

    Per trial a random symmetric H scaled to |H| = noise_scale * eigengap
    perturbs the clean Laplacian; the Procrustes deviation of the m lowest
    scaled eigenvectors must stay within 2|H|/(gap - |H|), and every
    certified maximum of the perturbed objective must sit within
    spurious_tol (radians) of a clean +-Z direction.
    """
    if not 0 < noise_scale <= 0.5:
        raise InputError(f"noise_scale must be in (0, 1/2], got {noise_scale}")
    if contrast is None:
        from .contrasts import builtin_contrast

        contrast = builtin_contrast("sig")
    x_clean, z, gap = clean_directions(g, m)
    if gap <= 0:
        raise InputError("eigengap is zero; perturbation bound is undefined")
    lap = laplacian(g, LaplacianKind.UNNORMALIZED)
    n = g.n
    report = PerturbationReport(eigengap=gap, noise_scale=noise_scale)
    n_starts = starts or 50 * m
    for k in range(trials):
        rng = np.random.default_rng([seed, k])
        raw = rng.standard_normal((n, n))
        h = 0.5 * (raw + raw.T)
        h *= (noise_scale * gap) / operator_norm(h)
        h_norm = operator_norm(h)
        if h_norm >= gap:
            report.trials.append(PerturbationTrial(
                h_norm, 0.0, 0.0, 0.0, 0, 0.0, 0, skipped=True,
                reason="perturbation norm reached the eigengap",
            ))
            continue
        emb_t = spectral_embed(lap + h, m)
        deviation = embedding_deviation(x_clean, emb_t.X)
        bound = 2.0 * h_norm / (gap - h_norm)
        obj = EmpiricalObjective(contrast, emb_t.X)
        cert = enumerate_maxima(obj, n_starts, [seed, k, 1], reference=z,
                                spurious_tol=spurious_tol)
        localization = max(cert.angular_errors) if cert.angular_errors else 0.0
        report.trials.append(PerturbationTrial(
            h_norm=h_norm, deviation=deviation, bound=bound,
            ratio=deviation / bound, n_classes=cert.n_classes,
            localization=localization, n_spurious=len(cert.spurious),
        ))
    return report
