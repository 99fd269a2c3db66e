"""Uniform subsampling with size formulas for density preservation.

Additive coresets keep |kde(P, x) - kde(P0, x)| <= alpha everywhere with
probability 1 - delta; relative ones keep the error below
eps * max(kde(P, x), rho).  Sampling is i.i.d. with replacement so both
guarantees follow from plain concentration; sizes clamp to [1, n].
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import PointSet, as_pointset


def additive_sample_size(alpha, delta, c=4.0):
    """ceil(c * ln(1/delta) / alpha^2)."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError("alpha must lie in (0, 1]")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if c <= 0.0:
        raise ValueError("c must be positive")
    return math.ceil(c * math.log(1.0 / delta) / alpha**2)


def relative_sample_size(eps, rho, delta, d, c=1.0):
    """ceil(c * (d/eps^2) * (1/rho) * (ln(1/rho) + ln(1/delta)))."""
    if not 0.0 < eps <= 1.0:
        raise ValueError("eps must lie in (0, 1]")
    if not 0.0 < rho <= 1.0:
        raise ValueError("rho must lie in (0, 1]")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if d < 1:
        raise ValueError("d must be >= 1")
    if c <= 0.0:
        raise ValueError("c must be positive")
    return math.ceil(
        c * (d / eps**2) * (1.0 / rho) * (math.log(1.0 / rho) + math.log(1.0 / delta))
    )


def uniform_sample(points, size, rng):
    """size i.i.d. draws with replacement; deterministic given rng state."""
    ps = as_pointset(points)
    if size < 1:
        raise ValueError("size must be >= 1")
    idx = rng.integers(0, ps.n, size=int(size))
    return PointSet(ps.points[idx])


@dataclass(frozen=True)
class CoresetSpec:
    """Recipe for a coreset: kind 'additive' or 'relative' plus its knobs."""

    kind: str
    delta: float
    alpha: float | None = None
    eps: float | None = None
    rho: float | None = None
    c: float | None = None

    def __post_init__(self):
        if self.kind == "additive":
            if self.alpha is None:
                raise ValueError("additive coreset needs alpha")
        elif self.kind == "relative":
            if self.eps is None or self.rho is None:
                raise ValueError("relative coreset needs eps and rho")
        else:
            raise ValueError("kind must be 'additive' or 'relative'")

    def sample_size(self, n, d=None):
        """Formula size clamped to [1, n]."""
        if self.kind == "additive":
            c = 4.0 if self.c is None else self.c
            size = additive_sample_size(self.alpha, self.delta, c)
        else:
            if d is None:
                raise ValueError("relative coreset size needs d")
            c = 1.0 if self.c is None else self.c
            size = relative_sample_size(self.eps, self.rho, self.delta, d, c)
        return max(1, min(int(n), size))

    def draw(self, points, rng):
        ps = as_pointset(points)
        return uniform_sample(ps, self.sample_size(ps.n, ps.d), rng)
