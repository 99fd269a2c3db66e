"""2-D mode finding through rectangle depth.

Around every data point sits an implicit family of m^2 concentric
axis-parallel rectangles whose half-widths r_0..r_{m-1} discretize the
kernel into m equal level slices.  The depth of a point x in the full
family, divided by n*m^2, sandwiches the normalized density at x to
within eps*rho/3.  Sampling the family and taking a maximum-depth point
of the sample therefore yields an approximate mode; the maximum-depth
point itself comes from a plane sweep with a segment tree.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import ModeResult, SolveParams, Stopwatch, as_pointset, kde


@dataclass(frozen=True)
class WidthLevels:
    """Half-width ladder r_j = sqrt(ln(1/(1 - j/m))), j = 0..m, r_m = inf."""

    m: int
    radii: np.ndarray

    def level_index(self, dist):
        """Minimal j with dist <= r_j, i.e. ceil(m*(1 - e^{-dist^2}))."""
        dist = np.asarray(dist, dtype=np.float64)
        raw = np.ceil(-self.m * np.expm1(-(dist * dist)))
        return np.clip(raw, 0, self.m).astype(np.int64)


def width_levels(eps, rho):
    v = eps * rho
    if not 0.0 < v < 1.0:
        raise ValueError("eps * rho must lie in (0, 1)")
    m = math.ceil(6.0 / v)
    j = np.arange(m + 1, dtype=np.float64)
    radii = np.empty(m + 1)
    radii[:m] = np.sqrt(-np.log1p(-j[:m] / m))
    radii[m] = np.inf
    return WidthLevels(m=m, radii=radii)


@dataclass(frozen=True)
class Rect:
    """Closed axis-parallel rectangle [x_lo, x_hi] x [y_lo, y_hi]."""

    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float

    def __post_init__(self):
        if not (self.x_lo <= self.x_hi and self.y_lo <= self.y_hi):
            raise ValueError("rectangle intervals must satisfy lo <= hi")

    def contains(self, x):
        x = np.asarray(x, dtype=np.float64)
        return bool(
            self.x_lo <= x[0] <= self.x_hi and self.y_lo <= x[1] <= self.y_hi
        )


@dataclass(frozen=True)
class RectFamily:
    """Explicit family as a (k, 4) array [x_lo, x_hi, y_lo, y_hi]."""

    rects: np.ndarray
    seed: int | None = None
    requested: int | None = None
    levels: WidthLevels | None = None

    def __post_init__(self):
        r = np.asarray(self.rects, dtype=np.float64)
        if r.ndim != 2 or r.shape[1] != 4:
            raise ValueError("rects must be (k, 4)")
        if not np.all(np.isfinite(r)):
            raise ValueError("rectangles must be finite")
        if np.any(r[:, 0] > r[:, 1]) or np.any(r[:, 2] > r[:, 3]):
            raise ValueError("rectangle intervals must satisfy lo <= hi")
        object.__setattr__(self, "rects", r)

    def __len__(self):
        return self.rects.shape[0]

    def rect(self, i):
        return Rect(*self.rects[i])


@dataclass(frozen=True)
class ImplicitRectFamily:
    """The full n*m^2 family, addressed by (point index, a1, a2) and never
    materialized; depth queries invert the radius ladder analytically."""

    points: np.ndarray
    levels: WidthLevels

    def __post_init__(self):
        p = np.asarray(self.points, dtype=np.float64)
        if p.ndim != 2 or p.shape[1] != 2:
            raise ValueError("points must be (n, 2)")
        object.__setattr__(self, "points", p)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def total_implicit_size(self):
        return self.n * self.levels.m**2

    def rect(self, i, a1, a2):
        m = self.levels.m
        if not (0 <= a1 < m and 0 <= a2 < m):
            raise ValueError(f"level indices must lie in [0, {m})")
        p = self.points[i]
        r1 = float(self.levels.radii[a1])
        r2 = float(self.levels.radii[a2])
        return Rect(p[0] - r1, p[0] + r1, p[1] - r2, p[1] + r2)

    def depth(self, x):
        x = np.asarray(x, dtype=np.float64).reshape(2)
        a = self.levels.level_index(np.abs(self.points - x))
        per_point = (self.levels.m - a).prod(axis=1)
        return int(per_point.sum())


def rect_family(points, levels):
    """The implicit family over a 2-D point set."""
    ps = as_pointset(points)
    if ps.d != 2:
        raise ValueError("rectangle families require 2-D points")
    return ImplicitRectFamily(points=ps.points, levels=levels)


def depth_at(family, x):
    """Number of rectangles of the family containing x (closed)."""
    x = np.asarray(x, dtype=np.float64).reshape(2)
    if isinstance(family, ImplicitRectFamily):
        return family.depth(x)
    r = family.rects if isinstance(family, RectFamily) else np.asarray(family)
    inside = (
        (r[:, 0] <= x[0]) & (x[0] <= r[:, 1])
        & (r[:, 2] <= x[1]) & (x[1] <= r[:, 3])
    )
    return int(inside.sum())


def sample_count(eps, rho, delta, c=1.0):
    """ceil(c * (1/(eps^2 rho)) * (ln(1/rho) + ln(1/delta)))."""
    if eps <= 0.0 or not 0.0 < rho <= 1.0 or not 0.0 < delta < 1.0:
        raise ValueError("eps > 0, rho in (0, 1], delta in (0, 1) required")
    if c <= 0.0:
        raise ValueError("c must be positive")
    return math.ceil(
        c * (math.log(1.0 / rho) + math.log(1.0 / delta)) / (eps * eps * rho)
    )


def sample_rectangles(points, eps, rho, delta, c=1.0, seed=0):
    """i.i.d. uniform draws from the implicit family (point x level pair)."""
    ps = as_pointset(points)
    if ps.d != 2:
        raise ValueError("rectangle families require 2-D points")
    levels = width_levels(eps, rho)
    k = sample_count(eps, rho, delta, c)
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, ps.n, size=k)
    a1 = rng.integers(0, levels.m, size=k)
    a2 = rng.integers(0, levels.m, size=k)
    px = ps.points[idx, 0]
    py = ps.points[idx, 1]
    r1 = levels.radii[a1]
    r2 = levels.radii[a2]
    rects = np.column_stack([px - r1, px + r1, py - r2, py + r2])
    return RectFamily(rects=rects, seed=seed, requested=k, levels=levels)


class _MaxAddTree:
    """Segment tree over atoms: range add, global max with leftmost index."""

    def __init__(self, n):
        size = 1
        while size < n:
            size *= 2
        self.size = size
        self.mx = [0] * (2 * size)
        self.pending = [0] * (2 * size)

    def add(self, lo, hi, v):
        l = lo + self.size
        r = hi + self.size + 1
        ll, rr = l, r - 1
        mx, pending = self.mx, self.pending
        while l < r:
            if l & 1:
                mx[l] += v
                pending[l] += v
                l += 1
            if r & 1:
                r -= 1
                mx[r] += v
                pending[r] += v
            l >>= 1
            r >>= 1
        for i in (ll >> 1, rr >> 1):
            while i:
                left = mx[2 * i]
                right = mx[2 * i + 1]
                mx[i] = (left if left >= right else right) + pending[i]
                i >>= 1

    @property
    def top(self):
        return self.mx[1]

    def argmax(self):
        # valid only when some real atom attains the top value
        i = 1
        while i < self.size:
            i *= 2
            if self.mx[i] < self.mx[i + 1]:
                i += 1
        return i - self.size


def max_depth_point(family):
    """A point of exact maximum depth and that depth.

    Plane sweep over x with a segment tree over y-atoms (endpoint values
    and the open gaps between them).  Rectangles are closed, so at each
    event column the entering rectangles are counted before the leaving
    ones.  Ties break toward the smallest x, then the smallest y; the
    returned point is the midpoint of its arrangement cell.
    """
    rects = family.rects if isinstance(family, RectFamily) else np.asarray(
        family, dtype=np.float64
    )
    if rects.ndim != 2 or rects.shape[1] != 4 or rects.shape[0] == 0:
        raise ValueError("need a non-empty (k, 4) rectangle array")
    ys = np.unique(np.concatenate([rects[:, 2], rects[:, 3]]))
    lo_atom = 2 * np.searchsorted(ys, rects[:, 2])
    hi_atom = 2 * np.searchsorted(ys, rects[:, 3])
    n_atoms = 2 * ys.size - 1

    k = rects.shape[0]
    ex = np.concatenate([rects[:, 0], rects[:, 1]])
    etype = np.concatenate([np.zeros(k, np.int64), np.ones(k, np.int64)])
    ealo = np.concatenate([lo_atom, lo_atom])
    eahi = np.concatenate([hi_atom, hi_atom])
    order = np.lexsort((etype, ex))

    def atom_y(a):
        if a % 2 == 0:
            return float(ys[a // 2])
        return float(0.5 * (ys[a // 2] + ys[a // 2 + 1]))

    tree = _MaxAddTree(n_atoms)
    best_depth = 0
    best_x = best_y = 0.0
    i = 0
    n_ev = order.size
    while i < n_ev:
        x = ex[order[i]]
        j = i
        while j < n_ev and ex[order[j]] == x and etype[order[j]] == 0:
            e = order[j]
            tree.add(int(ealo[e]), int(eahi[e]), 1)
            j += 1
        if tree.top > best_depth:
            best_depth = tree.top
            best_x = float(x)
            best_y = atom_y(tree.argmax())
        while j < n_ev and ex[order[j]] == x:
            e = order[j]
            tree.add(int(ealo[e]), int(eahi[e]), -1)
            j += 1
        if j < n_ev and tree.top > best_depth:
            best_depth = tree.top
            best_x = float(0.5 * (x + ex[order[j]]))
            best_y = atom_y(tree.argmax())
        i = j
    return np.array([best_x, best_y]), int(best_depth)


def brute_max_depth(family):
    """Reference maximum depth over the lower-left corner grid.

    Any maximum-depth point can slide left then down until it hits the
    lower edge of some containing rectangle on each axis, so the maximum
    is attained at a (x_lo, y_lo) pair.  Counting is a 0/1 matrix product,
    exact for families below a few thousand rectangles.
    """
    rects = family.rects if isinstance(family, RectFamily) else np.asarray(
        family, dtype=np.float64
    )
    xs = np.unique(rects[:, 0])
    ys = np.unique(rects[:, 2])
    in_x = (rects[None, :, 0] <= xs[:, None]) & (xs[:, None] <= rects[None, :, 1])
    in_y = (rects[None, :, 2] <= ys[:, None]) & (ys[:, None] <= rects[None, :, 3])
    depth = in_x.astype(np.float64) @ in_y.astype(np.float64).T
    return int(depth.max())


def mode_2d(points, eps, rho, delta=0.1, seed=0, c=1.0):
    """Approximate 2-D mode: sample the implicit family, return a point of
    maximum sampled depth.  Succeeds (value >= (1-eps) * optimum) with
    probability at least 1 - delta when the true mode density is >= rho.
    """
    ps = as_pointset(points)
    if ps.d != 2:
        raise ValueError("mode_2d requires 2-D points")
    params = SolveParams(eps=eps, rho=rho, delta=delta, seed=seed)
    watch = Stopwatch()
    family = sample_rectangles(ps, eps, rho, delta, c=c, seed=seed)
    x, depth = max_depth_point(family)
    return ModeResult(
        x=x,
        value=kde(ps, x),
        algorithm="rect2d",
        params=params,
        elapsed=watch.elapsed(),
        extra={
            "m": family.levels.m,
            "rects": len(family),
            "depth": depth,
        },
    )
