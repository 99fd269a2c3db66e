"""Additive-accuracy mode search through truncated Taylor polynomials.

The density is a sum of exp(-||x - p||^2) terms, which factor per
coordinate.  Truncating each coordinate factor to s series terms gives a
polynomial whose error inside a bounded region is provably small, so
maximizing the polynomial over a ball around each occupied grid cell and
keeping the best witness lands within an additive eps*rho of the true
mode density.  The polynomial feasibility step (find x in the ball with
poly(x) >= beta) is solved by multistart projected mean-shift ascent plus
a certified two-level grid for d <= 3, driven by binary search on beta.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._backend import censored_kde_bound, kde_value, meanshift_step
from .core import (
    BudgetExceededError,
    ModeResult,
    SolveParams,
    Stopwatch,
    as_pointset,
    _as_point,
    kde,
)

# max of |d/dt exp(-t^2)| = sqrt(2/e), reached at t = 1/sqrt(2)
LIP_KERNEL = math.sqrt(2.0 / math.e)

DEFAULT_S_MAX = 600
_RANDOM_STARTS = 32
_NEGLIGIBLE = 1e-30


def log_inv(eps, rho):
    """ln(1/(eps*rho)); requires 0 < eps*rho < 1."""
    v = eps * rho
    if not 0.0 < v < 1.0:
        raise ValueError("eps * rho must lie in (0, 1)")
    return math.log(1.0 / v)


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned lattice with cell width 2*sqrt(ln(1/(eps*rho))/d)."""

    d: int
    width: float

    @classmethod
    def for_params(cls, eps, rho, d):
        if d < 1:
            raise ValueError("d must be >= 1")
        return cls(d=d, width=2.0 * math.sqrt(log_inv(eps, rho) / d))

    def point(self, index):
        return np.asarray(index, dtype=np.float64) * self.width


@dataclass(frozen=True)
class Neighborhood:
    """Occupied lattice cell: integer index, its point, member indices."""

    index: tuple
    center: np.ndarray
    members: np.ndarray


def grid_neighborhoods(points, eps, rho, max_cells_per_point=100_000):
    """All lattice points within 4*sqrt(ln(1/(eps*rho))) of some data point.

    Each returned neighborhood lists the data points within that radius of
    its lattice point.  Sorted by lattice index.
    """
    ps = as_pointset(points)
    spec = GridSpec.for_params(eps, rho, ps.d)
    radius = 4.0 * math.sqrt(log_inv(eps, rho))
    w = spec.width
    cells = {}
    for i, p in enumerate(ps.points):
        los = np.ceil((p - radius) / w).astype(np.int64)
        his = np.floor((p + radius) / w).astype(np.int64)
        count = int(np.prod(his - los + 1))
        if count > max_cells_per_point:
            raise BudgetExceededError(
                f"{count} candidate cells per point exceeds the budget; "
                "dimension too high for the lattice enumeration"
            )
        axes = [np.arange(lo, hi + 1) for lo, hi in zip(los, his)]
        grids = np.meshgrid(*axes, indexing="ij")
        idx = np.stack([g.ravel() for g in grids], axis=1)
        centers = idx * w
        keep = ((centers - p) ** 2).sum(axis=1) <= radius * radius
        for row in idx[keep]:
            cells.setdefault(tuple(int(v) for v in row), []).append(i)
    out = []
    for key in sorted(cells):
        out.append(
            Neighborhood(
                index=key,
                center=spec.point(key),
                members=np.asarray(cells[key], dtype=np.int64),
            )
        )
    return out


def truncation_order(r, rp, d, eps, rho, s_max=DEFAULT_S_MAX):
    """ceil((r + rp)^2 * e^2 * ln(d/(eps*rho))), capped at s_max."""
    if r + rp <= 1.0:
        raise ValueError("r + rp must exceed 1")
    if d < 1:
        raise ValueError("d must be >= 1")
    if s_max < 1:
        raise ValueError("s_max must be >= 1")
    raw = math.ceil((r + rp) ** 2 * math.e**2 * math.log(d / (eps * rho)))
    return min(raw, int(s_max))


@dataclass(frozen=True)
class TruncatedTaylorPoly:
    """sum_p prod_i sum_{j<s} (1/j!) (-(x_i - p_i)^2)^j.

    coeffs[j] holds the signed coefficient (-1)^j / j!, built by running
    product.  The centers are the kernel centers p.
    """

    centers: np.ndarray
    s: int
    coeffs: np.ndarray

    @property
    def k(self):
        return self.centers.shape[0]

    @property
    def d(self):
        return self.centers.shape[1]

    def eval(self, x):
        return eval_truncated(self, x)

    def eval_batch(self, xs):
        xs = np.asarray(xs, dtype=np.float64)
        t = (xs[:, None, :] - self.centers[None, :, :]) ** 2
        inner = _inner_series(t, self.s, self.coeffs)
        return inner.prod(axis=2).sum(axis=1)

    def point_error_bound(self, t_max):
        """Bound on the per-center truncation error when every coordinate
        square stays below t_max."""
        tail = _series_tail_bound(t_max, self.s)
        if not math.isfinite(tail):
            return math.inf
        return self.d * tail * (1.0 + tail) ** (self.d - 1)

    def sum_error_bound(self, t_max):
        return self.k * self.point_error_bound(t_max)


def build_truncated_poly(points, s):
    """Truncation of the kernel sum around the given centers."""
    ps = as_pointset(points)
    if s < 1:
        raise ValueError("s must be >= 1")
    coeffs = np.empty(int(s))
    coeffs[0] = 1.0
    for j in range(1, int(s)):
        coeffs[j] = -coeffs[j - 1] / j
    return TruncatedTaylorPoly(centers=ps.points, s=int(s), coeffs=coeffs)


def eval_truncated(poly, x):
    """Value of the truncated polynomial at a single point."""
    x = _as_point(x, poly.d)
    return float(poly.eval_batch(x[None, :])[0])


# --- stable evaluation of the per-coordinate series ---------------------
#
# The inner factor sum_{j<s} (-t)^j / j! is an alternating series whose
# terms peak near j = t.  Direct summation is exact only while the peak
# term is small; past that the partial sum equals exp(-t) minus the tail
# sum_{j>=s}, which for t <= s/e starts below 1 and decays geometrically,
# so it can be summed forward without cancellation.  Anything else falls
# back to high-precision arithmetic.


def _stirling_lgamma(x):
    # lgamma(x + 1) for x >= 1, good to ~1e-8 relative, used for thresholds
    return x * np.log(x) - x + 0.5 * np.log(2.0 * np.pi * x) + 1.0 / (12.0 * x)


def _series_tail_bound(t, s):
    """Upper bound on |sum_{j>=s} (-t)^j / j!| for t >= 0."""
    if t <= 0.0:
        return 0.0
    ratio = t / (s + 1.0)
    if ratio >= 0.999:
        return math.inf
    lt0 = s * math.log(t) - math.lgamma(s + 1.0)
    if lt0 > 700.0:
        return math.inf
    return math.exp(lt0) / (1.0 - ratio)


def _tail_sum_vec(t, s):
    """sum_{j>=s} (-t)^j / j! for an array t with t <= s/e elementwise."""
    out = np.zeros_like(t)
    pos = t > 0.0
    if not np.any(pos):
        return out
    tv = t[pos]
    sign = -1.0 if s % 2 else 1.0
    term = sign * np.exp(s * np.log(tv) - math.lgamma(s + 1.0))
    acc = np.zeros_like(tv)
    floor = np.exp(-tv) * 1e-20 + 1e-300
    for k in range(100_000):
        acc += term
        term = term * (-tv) / (s + k + 1.0)
        if np.all(np.abs(term) <= floor + 1e-20 * np.abs(acc)):
            break
    out[pos] = acc
    return out


def _horner_vec(t, s, coeffs):
    acc = np.full_like(t, coeffs[s - 1])
    for j in range(s - 2, -1, -1):
        acc = coeffs[j] + t * acc
    return acc


def _mpmath_inner(t, s):
    import mpmath

    digits = 30 + int(0.87 * t)
    with mpmath.workdps(digits):
        tm = mpmath.mpf(t)
        term = mpmath.mpf(1)
        acc = mpmath.mpf(0)
        for j in range(s):
            acc += term
            term = term * (-tm) / (j + 1)
        return float(acc)


def _inner_series(t, s, coeffs):
    """Series value for an array of squared coordinate distances t >= 0."""
    t = np.asarray(t, dtype=np.float64)
    out = np.empty_like(t)
    flat_t = t.ravel()
    flat_out = out.ravel()

    # peak-term size decides whether direct Horner is exact enough
    jstar = np.minimum(s - 1.0, np.floor(flat_t))
    with np.errstate(divide="ignore", invalid="ignore"):
        lmax = np.where(
            jstar < 1.0, 0.0, jstar * np.log(np.maximum(flat_t, 1e-300)) - _stirling_lgamma(np.maximum(jstar, 1.0))
        )
    horner_ok = lmax <= math.log(1e-10 / (s * 2.3e-16))
    tail_ok = ~horner_ok & (flat_t <= s / math.e)
    rest = ~horner_ok & ~tail_ok

    if np.any(horner_ok):
        flat_out[horner_ok] = _horner_vec(flat_t[horner_ok], s, coeffs)
    if np.any(tail_ok):
        tv = flat_t[tail_ok]
        flat_out[tail_ok] = np.exp(-tv) - _tail_sum_vec(tv, s)
    if np.any(rest):
        flat_out[rest] = [_mpmath_inner(float(v), s) for v in flat_t[rest]]
    return out


# --- ball search machinery ----------------------------------------------


def _clip_to_ball(xs, q, radius):
    """Pull rows of xs into the closed ball, with a hair of margin so the
    squared-norm constraint survives rounding."""
    xs = np.atleast_2d(np.asarray(xs, dtype=np.float64))
    diff = xs - q
    norms = np.linalg.norm(diff, axis=1)
    factor = np.ones_like(norms)
    outside = norms > radius
    factor[outside] = (radius * (1.0 - 1e-12)) / norms[outside]
    return q + diff * factor[:, None]


def _ball_random(q, radius, d, rng, count):
    dirs = rng.standard_normal((count, d))
    dirs /= np.maximum(np.linalg.norm(dirs, axis=1), 1e-300)[:, None]
    rads = radius * rng.random(count) ** (1.0 / d)
    return q + dirs * rads[:, None]


def _ball_multistart(qpts, q, radius, rng, tol=1e-9, max_iters=120):
    """Projected mean-shift ascent on the kernel sum of qpts within the
    ball B(q, radius).  Returns the best in-ball iterate and its value."""
    starts = np.vstack(
        [
            q[None, :],
            _clip_to_ball(qpts, q, radius),
            _ball_random(q, radius, q.shape[0], rng, _RANDOM_STARTS),
        ]
    )
    xs = starts
    best_val = -math.inf
    best_x = q.copy()
    for _ in range(max_iters):
        new, vals = meanshift_step(qpts, xs)
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val = float(vals[i])
            best_x = xs[i].copy()
        new = _clip_to_ball(new, q, radius)
        moved = np.linalg.norm(new - xs, axis=1).max()
        xs = new
        if moved <= tol:
            break
    vals = kde_value(qpts, xs)
    i = int(np.argmax(vals))
    if vals[i] > best_val:
        best_val = float(vals[i])
        best_x = xs[i].copy()
    return best_x, best_val


def _certified_ball_max(qpts, q, radius, slack, v_hint, x_hint,
                        max_cell_evals=4_000_000):
    """Two-level exhaustive search over the ball.

    Guarantees max over the ball of the kernel sum <= returned value +
    reported slack.  Coarse cells are pruned with the censored-distance
    bound; survivors are refined at the Lipschitz spacing for `slack`.
    """
    k, d = qpts.shape
    lip = LIP_KERNEL * k
    h = 2.0 * slack / (math.sqrt(d) * lip)
    big = radius / 6.0 if radius > 0 else 1.0
    per_axis = max(2, math.ceil(2.0 * radius / big) + 1)
    axes = [np.linspace(q[i] - radius, q[i] + radius, per_axis) for i in range(d)]
    half = (axes[0][1] - axes[0][0]) / 2.0 if per_axis > 1 else radius
    grids = np.meshgrid(*axes, indexing="ij")
    centers = np.stack([g.ravel() for g in grids], axis=1)
    cell_rad = half * math.sqrt(d)
    keep = np.linalg.norm(centers - q, axis=1) <= radius + cell_rad
    centers = centers[keep]
    bounds = censored_kde_bound(qpts, centers, cell_rad)
    order = np.argsort(-bounds)

    steps = math.ceil(2.0 * half / h) + 1
    if steps**d > max_cell_evals:
        steps = max(2, int(max_cell_evals ** (1.0 / d)))
    h_actual = 2.0 * half / (steps - 1)
    achieved_slack = lip * h_actual * math.sqrt(d) / 2.0
    offsets = np.meshgrid(*[np.linspace(-half, half, steps)] * d, indexing="ij")
    offsets = np.stack([g.ravel() for g in offsets], axis=1)

    v_best, x_best = v_hint, np.asarray(x_hint, dtype=np.float64)
    for ci in order:
        if bounds[ci] <= v_best:
            break
        pts = _clip_to_ball(centers[ci] + offsets, q, radius)
        vals = kde_value(qpts, pts)
        i = int(np.argmax(vals))
        if vals[i] > v_best:
            v_best = float(vals[i])
            x_best = pts[i].copy()
    # polish the incumbent; keeps the certificate since it only improves
    xs = x_best[None, :]
    for _ in range(40):
        new, _ = meanshift_step(qpts, xs)
        new = _clip_to_ball(new, q, radius)
        if np.linalg.norm(new - xs) <= 1e-12:
            break
        xs = new
    val = float(kde_value(qpts, xs)[0])
    if val > v_best:
        v_best, x_best = val, xs[0].copy()
    return v_best, x_best, max(achieved_slack, slack)


class _BallSearch:
    """Shared state for feasibility probes over one polynomial and ball."""

    def __init__(self, poly, q, radius, eps, rho, slack, rng):
        self.poly = poly
        self.q = q
        self.radius = radius
        self.slack = slack
        self.rng = rng
        self.qpts = poly.centers
        dmax = radius + float(
            np.max(np.linalg.norm(self.qpts - q, axis=1)) if len(self.qpts) else 0.0
        )
        self.t_max = dmax * dmax
        self.surrogate_ok = (
            poly.sum_error_bound(self.t_max) <= _NEGLIGIBLE * max(1.0, poly.k)
        )
        self.grid_ran = False
        self.cert_slack = None
        if self.surrogate_ok:
            self.x_best, self.v_best = _ball_multistart(
                self.qpts, q, radius, rng
            )
        else:
            cands = np.vstack(
                [
                    q[None, :],
                    _clip_to_ball(self.qpts, q, radius),
                    _ball_random(q, radius, q.shape[0], rng, _RANDOM_STARTS),
                ]
            )
            vals = poly.eval_batch(cands)
            i = int(np.argmax(vals))
            self.v_best, self.x_best = float(vals[i]), cands[i].copy()

    def _in_ball(self, x):
        return float(((x - self.q) ** 2).sum()) <= self.radius * self.radius

    def verified(self, beta):
        """Honest witness check against the stated constraints."""
        if self.x_best is None:
            return None
        if not self._in_ball(self.x_best):
            return None
        if eval_truncated(self.poly, self.x_best) >= beta:
            return self.x_best.copy()
        return None

    def run_grid(self):
        if self.grid_ran or self.q.shape[0] > 3:
            return
        self.grid_ran = True
        if self.surrogate_ok:
            v, x, sl = _certified_ball_max(
                self.qpts, self.q, self.radius, self.slack, self.v_best, self.x_best
            )
            self.cert_slack = sl
        else:
            # honest dense scan at a fixed resolution; sound but cheap
            d = self.q.shape[0]
            steps = max(3, int(round(200_000 ** (1.0 / d))))
            axes = [
                np.linspace(self.q[i] - self.radius, self.q[i] + self.radius, steps)
                for i in range(d)
            ]
            grids = np.meshgrid(*axes, indexing="ij")
            pts = _clip_to_ball(np.stack([g.ravel() for g in grids], axis=1),
                                self.q, self.radius)
            vals = self.poly.eval_batch(pts)
            i = int(np.argmax(vals))
            v, x = float(vals[i]), pts[i].copy()
        if v > self.v_best:
            self.v_best, self.x_best = v, x

    def feasible(self, beta):
        """Witness with poly >= beta inside the ball, or None."""
        if self.v_best >= beta:
            w = self.verified(beta)
            if w is not None:
                return w
        self.run_grid()
        if self.v_best >= beta:
            return self.verified(beta)
        return None


def syspoly_feasible(poly, q, r, eps, rho, beta, rng=None):
    """Find x with poly(x) >= beta and ||x - q||^2 <= r^2 ln(1/(eps*rho)).

    Returns None when the multistart ascent and (for d <= 3) the certified
    grid both fail to produce a witness.  Any returned point satisfies
    both constraints under honest evaluation.
    """
    if beta < 0.0:
        raise ValueError("beta must be >= 0")
    q = _as_point(q, poly.d)
    radius = r * math.sqrt(log_inv(eps, rho))
    if rng is None:
        rng = np.random.default_rng(0)
    slack = 0.1 * poly.k * eps * rho
    state = _BallSearch(poly, q, radius, eps, rho, slack, rng)
    return state.feasible(beta)


def bisection_steps(k, n, eps, rho):
    """Number of binary-search steps: ceil(log2(k / (n*eps*rho/10)))."""
    gap = 0.1 * n * eps * rho
    if k <= gap:
        return 0
    return math.ceil(math.log2(k / gap))


def syspoly_search(points, q, r, rp, eps, rho, s_max=DEFAULT_S_MAX,
                   rng=None, stats=None):
    """Binary search on the level beta over one grid neighborhood.

    Builds the truncated polynomial over the points within
    rp*sqrt(ln(1/(eps*rho))) of q and returns the witness of the highest
    feasible beta probed.  Its kernel sum is within n*eps*rho/2 of the
    best achievable over the ball of radius r*sqrt(ln(1/(eps*rho))).
    """
    ps = as_pointset(points)
    q = _as_point(q, ps.d)
    ell = math.sqrt(log_inv(eps, rho))
    dist = np.linalg.norm(ps.points - q, axis=1)
    members = np.where(dist <= rp * ell)[0]
    if members.size == 0:
        raise ValueError("no points within the neighborhood radius of q")
    return _search_core(ps, q, members, r, rp, eps, rho, s_max, rng, stats)


def _search_core(ps, q, members, r, rp, eps, rho, s_max, rng, stats):
    if rng is None:
        rng = np.random.default_rng(0)
    ell = math.sqrt(log_inv(eps, rho))
    qpts = ps.points[members]
    k = qpts.shape[0]
    s = truncation_order(r, rp, ps.d, eps, rho, s_max)
    poly = build_truncated_poly(qpts, s)
    gap = 0.1 * ps.n * eps * rho
    steps = bisection_steps(k, ps.n, eps, rho)
    state = _BallSearch(poly, q, r * ell, eps, rho, gap, rng)

    lo, hi = 0.0, float(k)
    witness = state.feasible(0.0)
    if witness is None:
        # nothing verifies even at level 0; fall back to the grid point
        witness = q.copy()
    probes = 0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        probes += 1
        w = state.feasible(mid)
        if w is not None:
            lo = mid
            witness = w
        else:
            hi = mid
    if stats is not None:
        stats.update(
            steps=steps,
            probes=probes,
            beta_lo=lo,
            beta_hi=hi,
            s=s,
            s_capped=s < math.ceil((r + rp) ** 2 * math.e**2
                                   * math.log(ps.d / (eps * rho))),
            grid_used=state.grid_ran,
            members=k,
            value=float(kde_value(qpts, witness[None, :])[0]),
        )
    return witness


def mode_low_dim(points, eps, rho, s_max=DEFAULT_S_MAX, seed=0):
    """Mode search for d <= 3: solve every occupied grid neighborhood with
    r=2, rp=4 and keep the best witness.

    Assumes the mode density is at least rho.  The returned value is
    within eps*rho of the true maximum of the normalized density.
    Neighborhoods whose certified ceiling cannot beat the incumbent are
    skipped; this cannot change the argmax.
    """
    ps = as_pointset(points)
    watch = Stopwatch()
    rng = np.random.default_rng(seed)
    ell = math.sqrt(log_inv(eps, rho))
    nbhds = grid_neighborhoods(ps, eps, rho)
    qcenters = np.stack([nb.center for nb in nbhds])
    ceilings = censored_kde_bound(ps.points, qcenters, 2.0 * ell)
    order = sorted(range(len(nbhds)), key=lambda i: (-ceilings[i], nbhds[i].index))

    best_val = -math.inf
    best_index = None
    best_x = None
    solved = 0
    grids = 0
    for i in order:
        if ceilings[i] <= best_val:
            break
        nb = nbhds[i]
        st = {}
        x = _search_core(ps, nb.center, nb.members, 2.0, 4.0, eps, rho,
                         s_max, rng, st)
        solved += 1
        grids += bool(st["grid_used"])
        val = st["value"]
        if val > best_val or (val == best_val and
                              (best_index is None or nb.index < best_index)):
            best_val, best_index, best_x = val, nb.index, x
    value = kde(ps, best_x)
    return ModeResult(
        x=best_x,
        value=value,
        algorithm="grid-poly",
        params=SolveParams(eps=eps, rho=rho, seed=seed),
        elapsed=watch.elapsed(),
        extra={
            "neighborhoods": len(nbhds),
            "solved": solved,
            "grids": grids,
            "best_cell": best_index,
        },
    )
