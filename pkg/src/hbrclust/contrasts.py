"""Contrast-function catalog and the empirical sphere objective.

A contrast g maps absolute projections to scores; the empirical objective
averages g(|<u, x_i>|) over the embedded rows. The catalog:

    abs   g(t) = -t
    p     g(t) = t^p          (p > 2)
    ht    g(t) = -log cosh t
    sig   g(t) = -1 / (1 + exp(-t))
    gau   g(t) = exp(-t^2)

All five make h(x) = g(sqrt(x)) strictly convex, which is what basis
recovery from a spectral embedding needs. The origin-derivative condition
(h'(0+) equal to 0 or -inf) additionally holds for abs, p, and sig; ht and
gau have finite nonzero h'(0+) and are flagged accordingly, which matters
only for recovery under *arbitrary* positive weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InputError, NumericalError

_TINY = 1e-300


@dataclass(frozen=True)
class Contrast:
    """Scalar contrast with closed-form derivatives and admissibility flags.

    g, dg, d2g are vectorized over nonnegative arguments; p1/p2 are the
    analytically-known admissibility flags (strict convexity of g(sqrt x),
    origin derivative in {0, -inf}).
    """

    name: str
    g: Callable[[np.ndarray], np.ndarray]
    dg: Callable[[np.ndarray], np.ndarray]
    d2g: Callable[[np.ndarray], np.ndarray]
    p1: bool
    p2: bool

    def h(self, x):
        """h(x) = g(sqrt(x)) on [0, inf)."""
        return self.g(np.sqrt(np.asarray(x, dtype=float)))

    def h1(self, x):
        """First derivative of h, closed form away from 0."""
        s = np.sqrt(np.maximum(np.asarray(x, dtype=float), _TINY))
        return self.dg(s) / (2.0 * s)

    def h2(self, x):
        """Second derivative of h, closed form away from 0."""
        s = np.sqrt(np.maximum(np.asarray(x, dtype=float), _TINY))
        return (s * self.d2g(s) - self.dg(s)) / (4.0 * s**3)

    @property
    def kinked(self) -> bool:
        """True when g has a corner at 0 (nonzero one-sided derivative)."""
        return abs(float(self.dg(0.0))) > 0.0


def _sigma(t):
    return 1.0 / (1.0 + np.exp(-t))


def _log_cosh(t):
    t = np.abs(t)
    return t + np.log1p(np.exp(-2.0 * t)) - math.log(2.0)


BUILTIN_NAMES = ("abs", "p", "ht", "sig", "gau")


def builtin_contrast(name: str, p: float | None = None) -> Contrast:
    """Construct a catalog contrast by name ('p' needs an exponent > 2)."""
    if name == "abs":
        return Contrast(
            name="abs",
            g=lambda t: -np.asarray(t, dtype=float),
            dg=lambda t: -np.ones_like(np.asarray(t, dtype=float)),
            d2g=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
            p1=True,
            p2=True,
        )
    if name == "p":
        if p is None or not p > 2:
            raise InputError(f"power contrast requires p > 2, got {p}")
        q = float(p)
        return Contrast(
            name=f"p:{q:g}",
            g=lambda t: np.asarray(t, dtype=float) ** q,
            dg=lambda t: q * np.asarray(t, dtype=float) ** (q - 1.0),
            d2g=lambda t: q * (q - 1.0) * np.asarray(t, dtype=float) ** (q - 2.0),
            p1=True,
            p2=True,
        )
    if name == "ht":
        return Contrast(
            name="ht",
            g=lambda t: -_log_cosh(np.asarray(t, dtype=float)),
            dg=lambda t: -np.tanh(np.asarray(t, dtype=float)),
            d2g=lambda t: np.tanh(np.asarray(t, dtype=float)) ** 2 - 1.0,
            p1=True,
            p2=False,
        )
    if name == "sig":
        def g(t):
            return -_sigma(np.asarray(t, dtype=float))

        def dg(t):
            s = _sigma(np.asarray(t, dtype=float))
            return -s * (1.0 - s)

        def d2g(t):
            s = _sigma(np.asarray(t, dtype=float))
            return -s * (1.0 - s) * (1.0 - 2.0 * s)

        return Contrast(name="sig", g=g, dg=dg, d2g=d2g, p1=True, p2=True)
    if name == "gau":
        return Contrast(
            name="gau",
            g=lambda t: np.exp(-np.asarray(t, dtype=float) ** 2),
            dg=lambda t: -2.0 * np.asarray(t, dtype=float)
            * np.exp(-np.asarray(t, dtype=float) ** 2),
            d2g=lambda t: (4.0 * np.asarray(t, dtype=float) ** 2 - 2.0)
            * np.exp(-np.asarray(t, dtype=float) ** 2),
            p1=True,
            p2=False,
        )
    raise InputError(f"unknown contrast {name!r}; expected one of {BUILTIN_NAMES}")


def contrast_from_spec(spec: str) -> Contrast:
    """Parse a CLI contrast spec: abs | p:<value> | ht | sig | gau."""
    if spec.startswith("p:"):
        try:
            return builtin_contrast("p", p=float(spec[2:]))
        except ValueError as exc:
            raise InputError(f"bad power contrast spec {spec!r}") from exc
    return builtin_contrast(spec)


def check_admissibility(c: Contrast, grid: np.ndarray) -> tuple[bool, bool]:
    """Numerically test the two admissibility properties of a contrast.

    Strict convexity of h(x) = g(sqrt x) is checked by strict midpoint
    convexity over all pairs of grid points. The origin-derivative
    dichotomy is classified from the difference quotients q_k =
    (h(x_k) - h(0)) / x_k at x_k = 4^-k: for convex h these decrease to
    h'(0+), so a monotone blow-up past 1e6 x the initial magnitude reads
    as -inf, and a vanishing or geometrically decaying tail reads as 0.
    Anything else (finite nonzero limit, non-monotone data) fails.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise InputError("grid must be a 1-d array with at least 2 points")
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise InputError("grid must be sorted and strictly positive")

    hvals = c.h(grid)
    p1 = True
    for i in range(grid.size):
        mids = 0.5 * (grid[i] + grid[i + 1:])
        avg = 0.5 * (hvals[i] + hvals[i + 1:])
        gap = avg - c.h(mids)
        if np.any(gap <= 1e-12 * (1.0 + np.abs(avg))):
            p1 = False
            break

    kind, _ = classify_origin_derivative(c)
    return p1, kind in ("zero", "neg_inf")


def classify_origin_derivative(c: Contrast) -> tuple[str, float | None]:
    """Classify h'(0+) from difference quotients at x = 4^-k, k = 1..25.

    For convex h the quotients decrease to h'(0+). Returns one of
    ("neg_inf", None), ("zero", None), ("finite", limit), or
    ("ambiguous", None) when the data neither converges nor diverges
    cleanly.
    """
    h0 = float(c.h(0.0))
    xs = 4.0 ** -np.arange(1, 26)
    q = (np.asarray(c.h(xs), dtype=float) - h0) / xs
    decreasing = bool(np.all(np.diff(q) <= 0))
    q1, qlast = float(q[0]), float(q[-1])
    if decreasing and qlast <= -1e6 * max(abs(q1), 1e-12) and qlast <= -1e3:
        return "neg_inf", None
    if abs(qlast) <= 1e-9 * max(1.0, abs(q1)):
        return "zero", None
    tail = np.abs(q[-3:])
    geometric = bool(
        np.all(np.diff(tail) < 0)
        and tail[1] <= 0.95 * tail[0]
        and tail[2] <= 0.95 * tail[1]
    )
    if geometric:
        return "zero", None
    if abs(q[-1] - q[-2]) <= 1e-6 * (1.0 + abs(q[-1])):
        return "finite", float(qlast)
    return "ambiguous", None


@dataclass(frozen=True)
class RobustnessConstants:
    """Bounds on |h''| and |h'''| over a range, h(x) = g(sqrt |x|)."""

    c_min: float
    c_max: float
    d_bound: float

    @property
    def robust(self) -> bool:
        return self.c_min > 0 and math.isfinite(self.c_max) and math.isfinite(self.d_bound)


def estimate_robustness(
    c: Contrast, lo: float, hi: float, grid_size: int = 10_000
) -> RobustnessConstants:
    """Estimate curvature bounds of h over [lo, hi] on a uniform grid.

    c_min/c_max bound |h''|; the third-derivative bound comes from central
    finite differences of the closed-form h'' on the same grid.
    """
    if not (0 < lo < hi):
        raise InputError(f"range must satisfy 0 < lo < hi, got [{lo}, {hi}]")
    xs = np.linspace(lo, hi, grid_size)
    h2 = np.asarray(c.h2(xs), dtype=float)
    if not np.all(np.isfinite(h2)):
        bad = xs[int(np.flatnonzero(~np.isfinite(h2))[0])]
        raise NumericalError(f"non-finite second derivative at x = {bad}")
    a2 = np.abs(h2)
    step = xs[1] - xs[0]
    h3 = np.abs(h2[2:] - h2[:-2]) / (2.0 * step)
    return RobustnessConstants(
        c_min=float(a2.min()), c_max=float(a2.max()),
        d_bound=float(h3.max()) if h3.size else 0.0,
    )


class EmpiricalObjective:
    """Mean contrast of absolute projections onto embedded rows.

    F(u) = (1/n) sum_i g(|<u, x_i>|) for u on the unit sphere. value,
    gradient, and hessian skip argument validation (hot path); the
    module-level fg_value/fg_gradient wrappers validate.
    """

    def __init__(self, contrast: Contrast, rows):
        from .embedding import Embedding  # cycle-free local import

        if isinstance(rows, Embedding):
            rows = rows.X
        rows = np.asarray(rows, dtype=float)
        if rows.ndim != 2:
            raise InputError(f"rows must be an n x m array, got {rows.shape}")
        self.contrast = contrast
        self.rows = rows
        self.row_norms = np.linalg.norm(rows, axis=1)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def dim(self) -> int:
        return self.rows.shape[1]

    def value(self, u: np.ndarray) -> float:
        return float(np.mean(self.contrast.g(np.abs(self.rows @ u))))

    def value_many(self, us: np.ndarray) -> np.ndarray:
        """Values at the columns of a d x k matrix of unit vectors."""
        return np.mean(self.contrast.g(np.abs(self.rows @ us)), axis=0)

    def gradient(self, u: np.ndarray, zero_tol: float = 0.0) -> np.ndarray:
        """Euclidean gradient; rows at (or within zero_tol of) a kink add 0.

        zero_tol is relative to each row's norm; a positive value gives
        first-order tests a dead zone so that points numerically on a kink
        are treated as exactly on it.
        """
        p = self.rows @ u
        dead = np.abs(p) <= zero_tol * self.row_norms if zero_tol > 0.0 \
            else (p == 0.0)
        w = np.where(dead, 0.0, self.contrast.dg(np.abs(p)) * np.sign(p))
        return (self.rows.T @ w) / self.n

    def hessian(self, u: np.ndarray) -> np.ndarray:
        p = self.rows @ u
        w = self.contrast.d2g(np.abs(p))
        return (self.rows.T * w) @ self.rows / self.n

    def kink_normals(self, u: np.ndarray, angle_tol: float) -> np.ndarray:
        """Unit normals of the non-smoothness hyperplanes passing near u.

        For a contrast with a corner at 0 the objective is kinked across
        each hyperplane {v : <v, x_i> = 0}; the normals of those within
        angle_tol of u let local searches stay on the kink ridge.
        """
        if not self.contrast.kinked:
            return np.zeros((0, self.dim))
        norms = np.linalg.norm(self.rows, axis=1)
        keep = norms > 0.0
        unit = self.rows[keep] / norms[keep, None]
        near = np.abs(unit @ u) < math.sin(min(angle_tol, math.pi / 2))
        return unit[near]


def _check_point(obj: EmpiricalObjective, u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (obj.dim,):
        raise InputError(f"point has dimension {u.shape}, objective needs ({obj.dim},)")
    if abs(np.linalg.norm(u) - 1.0) > 1e-8:
        raise InputError(f"point must be unit norm, got {np.linalg.norm(u)}")
    return u


def fg_value(obj: EmpiricalObjective, u: np.ndarray) -> float:
    """F(u) for a validated unit vector u."""
    return obj.value(_check_point(obj, u))


def fg_gradient(obj: EmpiricalObjective, u: np.ndarray) -> np.ndarray:
    """Euclidean gradient of F at a validated unit vector u.

    Rows with a zero inner product contribute nothing (subgradient choice
    for contrasts kinked at the origin).
    """
    return obj.gradient(_check_point(obj, u))
