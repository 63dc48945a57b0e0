"""Cluster recovery by contrast maximization over the unit sphere.

Two algorithms:

* hbr_opt: deflated projected gradient ascent. Each center starts from a
  uniform draw on the sphere restricted to the orthogonal complement of the
  centers found so far, climbs the tangential gradient with a monotone
  dyadic step search, and finishes with cyclic one-dimensional line
  searches along tangent great circles. The polish stage is what lets the
  iterate land on the kink-type maxima of non-smooth contrasts (abs, sig)
  to within the displacement tolerance; a plain subgradient step cannot
  settle there because coordinates near a kink force rejections at any
  usable step size.

* hbr_enum: greedy selection of normalized data rows by precomputed
  objective value, subject to a minimum angle from already-chosen centers.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .contrasts import EmpiricalObjective
from .embedding import Embedding
from .errors import ExhaustionError, InputError
from .graph import Partition

_GOLD = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class HbrOptConfig:
    eta: float = 0.1
    max_iters: int = 1000
    tol: float = 1e-8
    seed: int = 0
    deflate_every_step: bool = True
    redraws: int = 12

    def validate(self):
        if not self.eta > 0:
            raise InputError(f"eta must be positive, got {self.eta}")
        if not self.tol > 0:
            raise InputError(f"tol must be positive, got {self.tol}")
        if self.max_iters < 1:
            raise InputError(f"max_iters must be >= 1, got {self.max_iters}")


@dataclass
class HbrEnumConfig:
    delta: float = 3.0 * math.pi / 8.0

    def validate(self):
        if not 0 < self.delta <= math.pi / 2:
            raise InputError(f"delta must be in (0, pi/2], got {self.delta}")


@dataclass
class RecoveredBasis:
    """Unit sphere directions recovered as cluster centers."""

    centers: np.ndarray
    iterations: list[int] = field(default_factory=list)
    objective_values: list[float] = field(default_factory=list)
    converged: list[bool] = field(default_factory=list)

    @property
    def m(self) -> int:
        return self.centers.shape[0]

    def pairwise_abs_inner(self) -> np.ndarray:
        return np.abs(self.centers @ self.centers.T)


def _project_out(v: np.ndarray, basis: list[np.ndarray]) -> np.ndarray:
    # two passes keep the residual orthogonal at machine precision
    for _ in range(2):
        for b in basis:
            v = v - (v @ b) * b
    return v


def _tangent_direction(i: int, u: np.ndarray, basis: list[np.ndarray]):
    t = np.zeros_like(u)
    t[i] = 1.0
    for _ in range(2):
        t = _project_out(t, basis)
        t -= (t @ u) * u
    nt = np.linalg.norm(t)
    # a tiny residual is numerically all rounding noise; using it would
    # reintroduce components along the deflated subspace
    if nt < 1e-6:
        return None
    return t / nt


def ascend(
    obj,
    u0: np.ndarray,
    basis=(),
    eta: float = 0.1,
    tol: float = 1e-8,
    max_iters: int = 1000,
    deflate_every_step: bool = True,
    coarse_tol: float = 1e-4,
    max_sweeps: int = 60,
    global_first_sweep: bool = True,
) -> tuple[np.ndarray, float, int, bool]:
    """Monotone ascent of obj.value over the sphere in span(basis)-perp.

    Returns (point, value, iterations, converged). obj needs value(u) and
    gradient(u); basis vectors must be orthonormal. Stage one is the
    projected (sub)gradient update u <- normalize(P(u + step * tangential
    gradient)) with dyadic step halving on any objective decrease and
    doubling on acceptance, run to a coarse displacement tolerance. Stage
    two refines with cyclic golden-section line searches along tangent
    great circles until the largest accepted move in a sweep drops below
    tol. With global_first_sweep the first sweep scans each full circle,
    which accelerates convergence but may hop between attraction basins;
    basin-respecting callers (multistart enumeration) switch it off.
    """
    basis = [np.asarray(b, dtype=float) for b in basis]
    u = np.asarray(u0, dtype=float).copy()
    d = u.size
    f = obj.value(u)
    step = eta
    step_cap = eta * 2.0**20
    it = 0

    while it < max_iters:
        it += 1
        grad = obj.gradient(u)
        gt = grad - u * (u @ grad)
        moved = False
        for _ in range(80):
            v = u + step * gt
            if deflate_every_step:
                v = _project_out(v, basis)
            nv = np.linalg.norm(v)
            if nv < 1e-300:
                step *= 0.5
                continue
            v /= nv
            fv = obj.value(v)
            if fv >= f:
                moved = True
                break
            step *= 0.5
        if not moved:
            break
        disp = float(np.linalg.norm(v - u))
        u, f = v, fv
        step = min(step * 2.0, step_cap)
        if disp < coarse_tol:
            break

    converged = False
    bracket = math.pi / 2.0 if global_first_sweep else math.pi / 8.0
    for sweep in range(max_sweeps):
        if it >= max_iters:
            break
        it += 1
        max_move = 0.0
        for i in range(d):
            t = _tangent_direction(i, u, basis)
            if t is None:
                continue

            def along(theta, u=u, t=t):
                v = u * math.cos(theta) + t * math.sin(theta)
                return v / np.linalg.norm(v)

            if sweep == 0 and global_first_sweep:
                thetas = np.linspace(-math.pi / 2, math.pi / 2, 65)[:-1]
                vals = [obj.value(along(th)) for th in thetas]
                best = int(np.argmax(vals))
                lo = thetas[best] - math.pi / 64
                hi = thetas[best] + math.pi / 64
            else:
                lo, hi = -bracket, bracket
            x1 = hi - _GOLD * (hi - lo)
            x2 = lo + _GOLD * (hi - lo)
            f1 = obj.value(along(x1))
            f2 = obj.value(along(x2))
            while hi - lo > 1e-10:
                if f1 < f2:
                    lo, x1, f1 = x1, x2, f2
                    x2 = lo + _GOLD * (hi - lo)
                    f2 = obj.value(along(x2))
                else:
                    hi, x2, f2 = x2, x1, f1
                    x1 = hi - _GOLD * (hi - lo)
                    f1 = obj.value(along(x1))
            theta = 0.5 * (lo + hi)
            v = along(theta)
            fv = obj.value(v)
            if fv > f:
                max_move = max(max_move, abs(theta))
                u, f = v, fv
        u = _project_out(u, basis)
        u /= np.linalg.norm(u)
        bracket = min(math.pi / 8.0, max(8.0 * max_move, 1e-7))
        if max_move < tol:
            converged = True
            break
    return u, f, it, converged


def _best_row_value(obj: EmpiricalObjective, basis: list[np.ndarray]) -> float:
    """Largest objective value over data-row directions in the complement."""
    r = obj.rows.copy()
    for b in basis:
        r -= np.outer(r @ b, b)
    norms = np.linalg.norm(r, axis=1)
    full = np.linalg.norm(obj.rows, axis=1).max()
    keep = norms > 1e-8 * max(full, 1.0)
    if not keep.any():
        return -np.inf
    candidates = (r[keep] / norms[keep, None]).T
    return float(obj.value_many(candidates).max())


def hbr_opt(obj: EmpiricalObjective, m: int, cfg: HbrOptConfig) -> RecoveredBasis:
    """Recover m cluster directions by deflated projected gradient ascent.

    Centers are found one at a time; each subsequent run is confined to the
    orthogonal complement of the previous centers. A run whose final value
    falls short of the best data-row direction in the same complement is
    restarted from a fresh draw (the data rows sit essentially at the
    maxima, so a shortfall means the ascent settled on a saddle); the best
    attempt is kept either way. Convergence failures are flagged on the
    result, never raised.
    """
    cfg.validate()
    if not 1 <= m <= obj.dim:
        raise InputError(f"m must satisfy 1 <= m <= {obj.dim}, got {m}")
    rng = np.random.default_rng(cfg.seed)
    centers: list[np.ndarray] = []
    iterations: list[int] = []
    values: list[float] = []
    converged: list[bool] = []
    for _ in range(m):
        row_bar = _best_row_value(obj, centers)
        best = None
        for _attempt in range(max(1, cfg.redraws)):
            u = rng.standard_normal(obj.dim)
            u = _project_out(u, centers)
            nu = np.linalg.norm(u)
            if nu < 1e-6:
                continue
            u /= nu
            u, f, iters, ok = ascend(
                obj, u, centers,
                eta=cfg.eta, tol=cfg.tol, max_iters=cfg.max_iters,
                deflate_every_step=cfg.deflate_every_step,
            )
            if best is None or f > best[1]:
                best = (u, f, iters, ok)
            if f >= row_bar - 1e-9 * (1.0 + abs(row_bar)):
                break
        u, f, iters, ok = best
        centers.append(u)
        iterations.append(iters)
        values.append(f)
        converged.append(ok)
    return RecoveredBasis(
        centers=np.array(centers), iterations=iterations,
        objective_values=values, converged=converged,
    )


def hbr_enum(obj: EmpiricalObjective, m: int, cfg: HbrEnumConfig) -> RecoveredBasis:
    """Greedy center selection among normalized data rows.

    Objective values at all row directions are precomputed once (one call
    per row); each round picks the highest-valued row at angle > delta
    from every chosen center, ties broken by lowest row index.
    """
    cfg.validate()
    if not 1 <= m <= obj.n:
        raise InputError(f"m must satisfy 1 <= m <= n = {obj.n}, got {m}")
    norms = np.linalg.norm(obj.rows, axis=1)
    keep = norms > 0.0
    if not keep.all():
        warnings.warn(
            f"skipping {int((~keep).sum())} zero rows with no direction",
            stacklevel=2,
        )
    idx = np.flatnonzero(keep)
    unit = obj.rows[idx] / norms[idx, None]
    values = np.array([obj.value(unit[i]) for i in range(len(idx))])

    chosen: list[int] = []
    eligible = np.ones(len(idx), dtype=bool)
    while len(chosen) < m:
        if not eligible.any():
            raise ExhaustionError(found=len(chosen), requested=m)
        masked = np.where(eligible, values, -np.inf)
        j = int(np.argmax(masked))
        chosen.append(j)
        angles = np.arccos(np.clip(unit @ unit[j], -1.0, 1.0))
        eligible &= angles > cfg.delta
    centers = unit[chosen]
    return RecoveredBasis(
        centers=centers,
        iterations=[0] * m,
        objective_values=[float(values[j]) for j in chosen],
        converged=[True] * m,
    )


def assign_clusters(basis: RecoveredBasis, x) -> Partition:
    """Label each row by the center with the largest |inner product|.

    Ties go to the lowest center index; all-zero rows therefore land in
    cluster 0 (they carry no direction) and trigger a warning.
    """
    rows = x.X if isinstance(x, Embedding) else np.asarray(x, dtype=float)
    if rows.shape[1] != basis.centers.shape[1]:
        raise InputError(
            f"embedding width {rows.shape[1]} != center dimension "
            f"{basis.centers.shape[1]}"
        )
    zero = ~rows.any(axis=1)
    if zero.any():
        warnings.warn(
            f"{int(zero.sum())} all-zero rows assigned to cluster 0",
            stacklevel=2,
        )
    scores = np.abs(rows @ basis.centers.T)
    return Partition(labels=np.argmax(scores, axis=1), m=basis.m)
