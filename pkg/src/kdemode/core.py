"""Gaussian kernel density estimates over finite point sets.

The kernel is fixed: K(x, y) = exp(-||x - y||^2).  Densities come in a
normalized form (mean of kernel values, written kde) and an unnormalized
form (plain sum).  All logarithms in derived quantities are natural.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ._backend import kde_value


class BudgetExceededError(RuntimeError):
    """Raised when an exhaustive routine would exceed its evaluation budget."""


class PointSet:
    """Immutable (n, d) collection of finite points, n >= 1, d >= 1.

    A 1-D input of length n is treated as n points on the line.
    """

    __slots__ = ("_arr",)

    def __init__(self, points):
        arr = np.array(points, dtype=np.float64, copy=True)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("points must form a non-empty 2-D array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("points must be finite")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        self._arr = arr

    @property
    def points(self):
        return self._arr

    @property
    def n(self):
        return self._arr.shape[0]

    @property
    def d(self):
        return self._arr.shape[1]

    def __len__(self):
        return self._arr.shape[0]

    def __iter__(self):
        return iter(self._arr)

    def __getitem__(self, i):
        return self._arr[i]

    def __repr__(self):
        return f"PointSet(n={self.n}, d={self.d})"


def as_pointset(points):
    return points if isinstance(points, PointSet) else PointSet(points)


def _as_point(x, d):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 0:
        x = x.reshape(1)
    if x.ndim != 1 or x.shape[0] != d:
        raise ValueError(f"expected a point in R^{d}, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("point must be finite")
    return x


def kernel(x, y):
    """exp(-||x - y||^2) for two points of equal dimension."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if x.shape != y.shape:
        raise ValueError("dimension mismatch")
    diff = x - y
    return math.exp(-float(diff @ diff))


def kde_unnormalized(points, x, compensated=False):
    """Sum of kernel values from x to every point.

    compensated=True sums with math.fsum for oracle-grade accuracy.
    """
    ps = as_pointset(points)
    x = _as_point(x, ps.d)
    if compensated:
        diff = ps.points - x
        d2 = (diff * diff).sum(axis=1)
        return math.fsum(math.exp(-float(t)) for t in d2)
    return float(kde_value(ps.points, x[None, :])[0])


def kde(points, x, compensated=False):
    """Mean kernel value at x; lies in (0, 1]."""
    ps = as_pointset(points)
    return kde_unnormalized(ps, x, compensated=compensated) / ps.n


def kde_batch(points, xs, normalized=True):
    """Density at each row of xs.  Convenience wrapper over the backend."""
    ps = as_pointset(points)
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[1] != ps.d:
        raise ValueError("xs must be (B, d)")
    vals = kde_value(ps.points, xs)
    return vals / ps.n if normalized else vals


def search_radius(rho):
    """Radius sqrt(ln(1/rho)); any point of density >= rho lies within
    this distance of some data point."""
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie in (0, 1)")
    return math.sqrt(math.log(1.0 / rho))


@dataclass(frozen=True)
class SolveParams:
    """Shared accuracy/confidence knobs for the solvers."""

    eps: float
    rho: float
    delta: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        if not 0.0 < self.rho <= 1.0:
            raise ValueError("rho must lie in (0, 1]")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if not self.eps * self.rho < 1.0:
            raise ValueError("eps * rho must be < 1")
        if not isinstance(self.seed, (int, np.integer)):
            raise ValueError("seed must be an integer")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 bits")

    def rng(self):
        return np.random.default_rng(self.seed)


@dataclass
class ModeResult:
    """Outcome of a mode search.

    value is always the normalized density of x on the full input set.
    extra carries algorithm specifics (grid size, projected dimension, ...).
    """

    x: np.ndarray
    value: float
    algorithm: str
    params: SolveParams | None
    elapsed: float
    extra: dict = field(default_factory=dict)


class Stopwatch:
    """Tiny helper so solvers report elapsed seconds uniformly."""

    def __init__(self):
        self.t0 = time.perf_counter()

    def elapsed(self):
        return time.perf_counter() - self.t0
