"""Brute-force references the solvers are tested against.

grid_mode exhaustively scans a grid fine enough that its best point is
within an additive eps*rho of the true mode, then polishes with
mean-shift (which can only improve).  multistart_meanshift_mode is the
cheap reference for dimensions where a grid is hopeless.  dense_ball_max
exhaustively maximizes a truncated polynomial over a ball with a
certified error, for checking the feasibility search.
"""

import math

import numpy as np

from ._backend import kde_value
from .core import (
    BudgetExceededError,
    ModeResult,
    Stopwatch,
    as_pointset,
    _as_point,
    kde,
    search_radius,
)
from .meanshift import (
    DEFAULT_MAX_ITERS,
    DEFAULT_TOL,
    mean_shift,
    mean_shift_batch,
)
from .polysolve import _clip_to_ball

DEFAULT_GRID_BUDGET = 60_000_000
_CHUNK = 200_000


def _grid_axes(lo, hi, h):
    axes = []
    for a, b in zip(lo, hi):
        steps = max(2, math.ceil((b - a) / h) + 1)
        axes.append(np.linspace(a, b, steps))
    return axes


def grid_mode(points, eps, rho, max_grid=DEFAULT_GRID_BUDGET, polish=True):
    """Exhaustive grid search with spacing eps*rho*sqrt(e/2)/(2*sqrt(d)).

    The grid covers every ball of radius sqrt(ln(1/rho)) around a data
    point, which contains the mode whenever its density is >= rho.  Since
    the normalized density is sqrt(2/e)-Lipschitz, the best grid point is
    within eps*rho/4 of the optimum; mean-shift polish then only improves.
    Raises BudgetExceededError instead of silently coarsening.
    """
    ps = as_pointset(points)
    if not 0.0 < eps < 1.0 or not 0.0 < rho < 1.0:
        raise ValueError("eps and rho must lie in (0, 1)")
    watch = Stopwatch()
    h = eps * rho * math.sqrt(math.e / 2.0) / (2.0 * math.sqrt(ps.d))
    pad = search_radius(rho)
    axes = _grid_axes(ps.points.min(axis=0) - pad, ps.points.max(axis=0) + pad, h)
    steps = tuple(len(a) for a in axes)
    total = int(np.prod([float(s) for s in steps]))
    if total > max_grid:
        raise BudgetExceededError(
            f"grid of {total} points exceeds the budget of {max_grid}; "
            "reduce the dimension or loosen eps*rho"
        )

    best_val = -math.inf
    best_x = None
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, total))
        multi = np.unravel_index(flat, steps)
        chunk = np.stack([axes[i][multi[i]] for i in range(ps.d)], axis=1)
        vals = kde_value(ps.points, chunk)
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val = float(vals[i])
            best_x = chunk[i].copy()

    grid_value = best_val / ps.n
    x = best_x
    if polish:
        x = mean_shift(ps, best_x, tol=1e-12, max_iters=300)
    return ModeResult(
        x=x,
        value=kde(ps, x),
        algorithm="oracle-grid",
        params=None,
        elapsed=watch.elapsed(),
        extra={
            "grid_points": total,
            "spacing": h,
            "grid_value": grid_value,
            "steps": list(steps),
        },
    )


def multistart_meanshift_mode(points, starts=32, iters=DEFAULT_MAX_ITERS,
                              seed=0, tol=DEFAULT_TOL, max_data_starts=None):
    """Mean-shift from every data point plus `starts` box-uniform points.

    max_data_starts caps how many data points seed the search (a seeded
    subset is used beyond the cap); the density being climbed is always
    the full set.
    """
    ps = as_pointset(points)
    rng = np.random.default_rng(seed)
    data_starts = ps.points
    if max_data_starts is not None and ps.n > max_data_starts:
        idx = rng.choice(ps.n, size=max_data_starts, replace=False)
        data_starts = ps.points[idx]
    lo = ps.points.min(axis=0)
    hi = ps.points.max(axis=0)
    extra = lo + (hi - lo) * rng.random((int(starts), ps.d))
    all_starts = np.vstack([data_starts, extra]) if starts else data_starts
    watch = Stopwatch()
    finals, vals = mean_shift_batch(ps, all_starts, tol=tol, max_iters=iters)
    best = int(np.argmax(vals))
    return ModeResult(
        x=finals[best],
        value=float(vals[best]) / ps.n,
        algorithm="oracle-ms",
        params=None,
        elapsed=watch.elapsed(),
        extra={"starts": int(all_starts.shape[0])},
    )


def dense_ball_max(poly, q, radius, err=1e-3, budget=2_000_000):
    """Certified maximum of a truncated polynomial over a closed ball.

    Returns (point, value, certified_err): no point of the ball exceeds
    value + certified_err.  The grid spacing comes from a coefficient-sum
    bound on the gradient, so the certificate is crude but sound; budgets
    blow up quickly with the ball size.
    """
    d = poly.d
    if d > 3:
        raise ValueError("dense ball search is limited to d <= 3")
    if radius <= 0.0 or err <= 0.0:
        raise ValueError("radius and err must be positive")
    q = _as_point(q, d)
    dmax = radius + float(np.max(np.linalg.norm(poly.centers - q, axis=1)))
    t_max = dmax * dmax

    # |S(t)| <= B0 and |S'(t)| <= B1 on [0, t_max], coefficient-sum bounds
    powers = np.power(t_max, np.arange(poly.s))
    absc = np.abs(poly.coeffs)
    b0 = float(absc @ powers)
    b1 = float((absc[1:] * np.arange(1, poly.s)) @ powers[:-1]) if poly.s > 1 else 0.0
    lip = poly.k * math.sqrt(d) * 2.0 * dmax * b1 * b0 ** (d - 1)

    if lip <= 0.0 or not math.isfinite(lip):
        steps = 2 if lip == 0.0 else None
        if steps is None:
            raise BudgetExceededError("gradient bound overflowed; ball too large")
    else:
        h = 2.0 * err / (math.sqrt(d) * lip)
        steps = max(2, math.ceil(2.0 * radius / h) + 1)
    if steps**d > budget:
        raise BudgetExceededError(
            f"{steps}^{d} grid points exceed the budget of {budget}"
        )
    axes = [np.linspace(q[i] - radius, q[i] + radius, steps) for i in range(d)]
    spacing = axes[0][1] - axes[0][0]
    cert = lip * spacing * math.sqrt(d) / 2.0

    shape = (steps,) * d
    total = steps**d
    best_val = -math.inf
    best_x = None
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, total))
        multi = np.unravel_index(flat, shape)
        chunk = np.stack([axes[i][multi[i]] for i in range(d)], axis=1)
        chunk = _clip_to_ball(chunk, q, radius)
        vals = poly.eval_batch(chunk)
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val = float(vals[i])
            best_x = chunk[i].copy()
    return best_x, best_val, cert
