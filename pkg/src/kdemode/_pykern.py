"""NumPy fallback for the compiled kernels.

Same signatures and semantics as kdemode._ckern; used when the extension
is not built or when KDEMODE_PURE_PYTHON=1.
"""

import numpy as np

BACKEND_NAME = "python"

# cap on rows-of-xs times points per temporary distance matrix
_BLOCK_ELEMS = 4_000_000


def _blocks(total, per_row):
    step = max(1, _BLOCK_ELEMS // max(1, per_row))
    for lo in range(0, total, step):
        yield lo, min(total, lo + step)


def _sq_dists(points, block):
    # ||x||^2 + ||p||^2 - 2 x.p, clipped at 0 against rounding
    d2 = (
        (block * block).sum(axis=1)[:, None]
        + (points * points).sum(axis=1)[None, :]
        - 2.0 * (block @ points.T)
    )
    return np.maximum(d2, 0.0)


def kde_value(points, xs):
    points = np.asarray(points, dtype=np.float64)
    xs = np.asarray(xs, dtype=np.float64)
    out = np.empty(xs.shape[0])
    for lo, hi in _blocks(xs.shape[0], points.shape[0]):
        out[lo:hi] = np.exp(-_sq_dists(points, xs[lo:hi])).sum(axis=1)
    return out


def meanshift_step(points, xs):
    points = np.asarray(points, dtype=np.float64)
    xs = np.asarray(xs, dtype=np.float64)
    new = np.empty_like(xs)
    vals = np.empty(xs.shape[0])
    for lo, hi in _blocks(xs.shape[0], points.shape[0]):
        d2 = _sq_dists(points, xs[lo:hi])
        dmin = d2.min(axis=1)
        w = np.exp(dmin[:, None] - d2)
        wsum = w.sum(axis=1)
        new[lo:hi] = (w @ points) / wsum[:, None]
        vals[lo:hi] = np.exp(-dmin) * wsum
    return new, vals


def censored_kde_bound(points, centers, slack):
    points = np.asarray(points, dtype=np.float64)
    centers = np.asarray(centers, dtype=np.float64)
    out = np.empty(centers.shape[0])
    for lo, hi in _blocks(centers.shape[0], points.shape[0]):
        t = np.sqrt(_sq_dists(points, centers[lo:hi])) - slack
        np.maximum(t, 0.0, out=t)
        out[lo:hi] = np.exp(-t * t).sum(axis=1)
    return out
