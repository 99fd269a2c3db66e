"""Mean-shift iteration for Gaussian kernel sums.

One step moves a query point to the kernel-weighted mean of the data.
Each step never decreases the kernel sum, so iterating climbs to a local
maximum of the density.  The same update recovers an original-space point
from a solution found among projected points (cross_space_shift).
"""

import numpy as np

from ._backend import kde_value, meanshift_step as _step_backend
from .core import PointSet, as_pointset, _as_point

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITERS = 200


def mean_shift_step(points, y):
    """One mean-shift update of y toward the weighted mean of the points.

    Weights exp(-||y - p||^2) are evaluated with distances shifted by
    their minimum, which is exact in real arithmetic and avoids 0/0 when
    y is far from every point.
    """
    ps = as_pointset(points)
    y = _as_point(y, ps.d)
    new, _ = _step_backend(ps.points, y[None, :])
    return new[0]


def mean_shift(points, x0, tol=DEFAULT_TOL, max_iters=DEFAULT_MAX_ITERS):
    """Iterate mean_shift_step from x0 until the step is below tol."""
    ps = as_pointset(points)
    x = _as_point(x0, ps.d)
    for _ in range(max_iters):
        nxt = mean_shift_step(ps, x)
        done = float(np.linalg.norm(nxt - x)) <= tol
        x = nxt
        if done:
            break
    return x


def mean_shift_batch(points, starts, tol=DEFAULT_TOL, max_iters=DEFAULT_MAX_ITERS):
    """Run mean-shift from every row of starts at once.

    Returns (finals, vals) where vals[i] is the unnormalized kernel sum
    at finals[i].
    """
    ps = as_pointset(points)
    xs = np.array(starts, dtype=np.float64, copy=True)
    if xs.ndim != 2 or xs.shape[1] != ps.d:
        raise ValueError("starts must be (B, d)")
    for _ in range(max_iters):
        new, _ = _step_backend(ps.points, xs)
        moved = np.linalg.norm(new - xs, axis=1).max()
        xs = new
        if moved <= tol:
            break
    return xs, kde_value(ps.points, xs)


def cross_space_shift(points, projected_points, x2):
    """Mean-shift update across spaces.

    Weights come from distances between x2 and the projected points;
    the returned point is the corresponding convex combination of the
    original points.  If the projection expands all pairwise distances,
    the kernel sum of the result in the original space is at least the
    kernel sum of x2 among the projected points.
    """
    ps = as_pointset(points)
    qs = as_pointset(projected_points)
    if ps.n != qs.n:
        raise ValueError("point sets must pair up one to one")
    x2 = _as_point(x2, qs.d)
    diff = qs.points - x2
    d2 = (diff * diff).sum(axis=1)
    d2 -= d2.min()
    w = np.exp(-d2)
    return (w @ ps.points) / w.sum()


def _gram_sq_dists(gram, alpha):
    """Squared distances from combinations alpha (B, n) to each point,
    given the Gram matrix of the points."""
    ag = alpha @ gram
    quad = (ag * alpha).sum(axis=1)
    return quad[:, None] - 2.0 * ag + np.diag(gram)[None, :]


def multistart_gram(gram, tol=DEFAULT_TOL, max_iters=DEFAULT_MAX_ITERS):
    """Multistart mean-shift given only the Gram matrix of the points.

    Starts at every point.  Iterates in the coefficient space of convex
    combinations, which reproduces the exact geometric iteration at any
    ambient dimension.  Returns (best_coeffs, best_val) with best_val the
    unnormalized kernel sum.
    """
    gram = np.asarray(gram, dtype=np.float64)
    n = gram.shape[0]
    alpha = np.eye(n)
    for _ in range(max_iters):
        d2 = np.maximum(_gram_sq_dists(gram, alpha), 0.0)
        w = np.exp(d2.min(axis=1)[:, None] - d2)
        new = w / w.sum(axis=1)[:, None]
        moved = np.abs(new - alpha).max()
        alpha = new
        if moved <= tol:
            break
    d2 = np.maximum(_gram_sq_dists(gram, alpha), 0.0)
    vals = np.exp(-d2).sum(axis=1)
    best = int(np.argmax(vals))
    return alpha[best], float(vals[best])
