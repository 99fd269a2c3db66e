"""Selects between the compiled kernels and the NumPy fallback.

The compiled extension beats NumPy on small, latency-bound batches (the
solvers' inner loops), while NumPy's matmul-based path wins on bulk work
where BLAS and vectorized exp dominate. When both are importable, each
call routes on its work volume; set KDEMODE_PURE_PYTHON=1 to force the
NumPy path everywhere.
"""

import os

import numpy as np

from . import _pykern

if os.environ.get("KDEMODE_PURE_PYTHON") == "1":
    _ckern = None
else:
    try:
        from . import _ckern  # type: ignore[attr-defined]
    except ImportError:
        _ckern = None

# rows * points * dim at which BLAS overtakes the scalar loops
_BULK_WORK = 2_000_000


def available_backends():
    """Names of the kernel backends importable in this environment."""
    names = ["python"]
    try:
        from . import _ckern as _probe  # noqa: F401

        names.insert(0, "compiled")
    except ImportError:
        pass
    return names


if _ckern is None:
    BACKEND = _pykern.BACKEND_NAME
    kde_value = _pykern.kde_value
    meanshift_step = _pykern.meanshift_step
    censored_kde_bound = _pykern.censored_kde_bound
else:
    BACKEND = _ckern.BACKEND_NAME

    def _bulk(points, xs):
        return xs.shape[0] * points.shape[0] * points.shape[1] > _BULK_WORK

    def kde_value(points, xs):
        points = np.ascontiguousarray(points, dtype=np.float64)
        xs = np.ascontiguousarray(xs, dtype=np.float64)
        if _bulk(points, xs):
            return _pykern.kde_value(points, xs)
        return _ckern.kde_value(points, xs)

    def meanshift_step(points, xs):
        points = np.ascontiguousarray(points, dtype=np.float64)
        xs = np.ascontiguousarray(xs, dtype=np.float64)
        if _bulk(points, xs):
            return _pykern.meanshift_step(points, xs)
        return _ckern.meanshift_step(points, xs)

    def censored_kde_bound(points, centers, slack):
        points = np.ascontiguousarray(points, dtype=np.float64)
        centers = np.ascontiguousarray(centers, dtype=np.float64)
        if _bulk(points, centers):
            return _pykern.censored_kde_bound(points, centers, slack)
        return _ckern.censored_kde_bound(points, centers, slack)
