"""Random projections with one-sided distortion and the mode pipelines
built on them.

A projection drawn here expands every pairwise distance (up to the target
failure probability) while stretching none by more than 1 + gamma.  Under
that guarantee a mode found among the projected points transfers back to
the original space through cross_space_shift with almost no loss, which
is what reduce_and_recover and mode_high_dim exploit.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._backend import kde_value
from .coresets import uniform_sample
from .core import (
    ModeResult,
    PointSet,
    SolveParams,
    Stopwatch,
    as_pointset,
    kde,
)
from .meanshift import cross_space_shift, mean_shift_batch
from .polysolve import log_inv, mode_low_dim

DEFAULT_C = 8.0
# per-trial projection failure probability inside mode_high_dim
TRIAL_JL_DELTA = 0.01
DEFAULT_M_MAX = 12
LOWDIM_MAX = 3
_EXTRA_STARTS = 8


def gamma_for(eps, rho):
    """Target distortion eps / (4 ln(4/(eps*rho)))."""
    if eps <= 0.0 or rho <= 0.0:
        raise ValueError("eps and rho must be positive")
    if eps * rho >= 4.0:
        raise ValueError("eps * rho must be below 4")
    return eps / (4.0 * math.log(4.0 / (eps * rho)))


def jl_dimension(k, delta, gamma, c=DEFAULT_C):
    """ceil(c * ln(k/delta) / gamma^2) projection rows for k points."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    if c <= 0.0:
        raise ValueError("c must be positive")
    return math.ceil(c * math.log(k / delta) / gamma**2)


@dataclass(frozen=True)
class Projection:
    """Linear map R^d -> R^m as an (m, d) matrix.

    kind records how the matrix was drawn; "identity" marks the trivial
    embedding used when projecting would not reduce the dimension.
    """

    matrix: np.ndarray
    gamma: float
    kind: str

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
            raise ValueError("matrix must be (m, d) with m, d >= 1")
        if self.kind not in ("gaussian", "sign", "identity"):
            raise ValueError("kind must be gaussian, sign, or identity")
        object.__setattr__(self, "matrix", m)

    @property
    def m(self):
        return self.matrix.shape[0]

    @property
    def d(self):
        return self.matrix.shape[1]

    def apply(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.d:
            raise ValueError(f"expected last axis {self.d}, got {x.shape}")
        return x @ self.matrix.T


def draw_projection(d, m, gamma, kind="gaussian", rng=None):
    """i.i.d. standard normal or sign entries scaled by (1+gamma/2)/sqrt(m).

    The scale biases the map toward expansion so that with high
    probability every pairwise distance satisfies
    ||u - v|| <= ||Pi u - Pi v|| <= (1 + gamma) ||u - v||.
    """
    if d < 1 or m < 1:
        raise ValueError("d and m must be >= 1")
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    if kind not in ("gaussian", "sign"):
        raise ValueError("kind must be 'gaussian' or 'sign'")
    if rng is None:
        rng = np.random.default_rng(0)
    if kind == "gaussian":
        entries = rng.standard_normal((m, d))
    else:
        entries = rng.integers(0, 2, size=(m, d)).astype(np.float64) * 2.0 - 1.0
    scale = (1.0 + gamma / 2.0) / math.sqrt(m)
    return Projection(matrix=entries * scale, gamma=gamma, kind=kind)


def identity_projection(d):
    return Projection(matrix=np.eye(d), gamma=0.0, kind="identity")


def project(pi, points):
    """Apply the projection to every point, preserving order."""
    ps = as_pointset(points)
    if ps.d != pi.d:
        raise ValueError(f"points live in R^{ps.d}, projection expects R^{pi.d}")
    return PointSet(pi.apply(ps.points))


def distortion_range(points, projected):
    """(min, max) over pairs of ||Pi u - Pi v|| / ||u - v||.

    Coincident pairs are skipped.  (1.0, 1.0) when every pair coincides.
    """
    ps = as_pointset(points)
    qs = as_pointset(projected)
    if ps.n != qs.n:
        raise ValueError("point sets must pair up one to one")
    iu = np.triu_indices(ps.n, k=1)
    orig = np.linalg.norm(ps.points[iu[0]] - ps.points[iu[1]], axis=1)
    proj = np.linalg.norm(qs.points[iu[0]] - qs.points[iu[1]], axis=1)
    keep = orig > 0.0
    if not np.any(keep):
        return 1.0, 1.0
    ratio = proj[keep] / orig[keep]
    return float(ratio.min()), float(ratio.max())


def pairwise_expansive(points, projected):
    """True when no pairwise distance shrinks under the projection."""
    lo, _ = distortion_range(points, projected)
    return lo >= 1.0


def _meanshift_solver(points, seed):
    """Fallback inner solver: mean-shift from every point plus a few
    box-uniform starts.  Returns (x, unnormalized value)."""
    ps = as_pointset(points)
    rng = np.random.default_rng(seed)
    lo = ps.points.min(axis=0)
    hi = ps.points.max(axis=0)
    extra = lo + (hi - lo) * rng.random((_EXTRA_STARTS, ps.d))
    starts = np.vstack([ps.points, extra])
    finals, vals = mean_shift_batch(ps, starts)
    i = int(np.argmax(vals))
    return finals[i], float(vals[i])


def _inner_solve(points, eps, rho, seed, lowdim_max, s_max=None):
    """Mode of the projected set: exact-style grid solver in very low
    dimension, multistart mean-shift otherwise."""
    ps = as_pointset(points)
    if ps.d <= lowdim_max:
        kwargs = {} if s_max is None else {"s_max": s_max}
        res = mode_low_dim(ps, eps, rho, seed=seed, **kwargs)
        return res.x, res.value * ps.n, "grid-poly"
    x, val = _meanshift_solver(ps, seed)
    return x, val, "meanshift"


def reduce_and_recover(points, eps, rho, delta=0.1, low_dim_solver=None,
                       seed=0, c=DEFAULT_C, m_max=DEFAULT_M_MAX,
                       lowdim_max=LOWDIM_MAX):
    """Project, solve the projected instance, lift the answer back.

    The inner solve runs at accuracy eps/2 with floor rho*(1 - eps/2), so
    the two losses compose to at most (1 - eps) against the true mode.
    low_dim_solver, when given, is called as f(projected, eps, rho, seed)
    and must return the solution point.
    """
    ps = as_pointset(points)
    params = SolveParams(eps=eps, rho=rho, delta=delta, seed=seed)
    watch = Stopwatch()
    rng = params.rng()
    gamma = gamma_for(eps, rho)
    m_formula = jl_dimension(ps.n + 1, delta, gamma, c)
    m_used = min(m_formula, ps.d, m_max)
    if m_used >= ps.d:
        pi = identity_projection(ps.d)
        projected = ps
    else:
        pi = draw_projection(ps.d, m_used, gamma, "gaussian", rng)
        projected = project(pi, ps)

    inner_eps = eps / 2.0
    inner_rho = rho * (1.0 - eps / 2.0)
    if low_dim_solver is not None:
        x2 = np.asarray(low_dim_solver(projected, inner_eps, inner_rho, seed),
                        dtype=np.float64)
        inner_alg = "custom"
    else:
        x2, _, inner_alg = _inner_solve(projected, inner_eps, inner_rho,
                                        seed, lowdim_max)
    x1 = cross_space_shift(ps, projected, x2)

    expansive = None
    if ps.n <= 2000:
        expansive = pairwise_expansive(ps, projected)
    return ModeResult(
        x=x1,
        value=kde(ps, x1),
        algorithm="jl-reduce",
        params=params,
        elapsed=watch.elapsed(),
        extra={
            "gamma": gamma,
            "m_formula": m_formula,
            "m_used": int(pi.m),
            "projection": pi.kind,
            "inner_algorithm": inner_alg,
            "expansive": expansive,
            "projected_value": float(kde_value(projected.points, x2[None, :])[0]),
        },
    )


def first_stage_size(eps, rho, c0=1.0):
    """ceil(c0 / (eps*rho)^2) sample size; additive eps*rho error floor."""
    if c0 <= 0.0:
        raise ValueError("c0 must be positive")
    return math.ceil(c0 / (eps * rho) ** 2)


def second_stage_size(m, eps, rho, c2=1.0):
    """ceil(c2 * sqrt(m * ln(1/(eps*rho))) / (eps*rho))."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if c2 <= 0.0:
        raise ValueError("c2 must be positive")
    return math.ceil(c2 * math.sqrt(m * log_inv(eps, rho)) / (eps * rho))


def mode_high_dim(points, eps, rho, delta=0.1, seed=0, c=DEFAULT_C,
                  c0=1.0, c2=1.0, m_max=DEFAULT_M_MAX,
                  lowdim_max=LOWDIM_MAX):
    """Mode search that never solves anything in the ambient dimension.

    Each of max(1, ceil(ln(1/delta))) trials subsamples, projects, solves
    the small projected instance, and lifts the answer back; the winner is
    the candidate with the best density over the union of the first-stage
    samples.  The reported value is on the full input.
    """
    ps = as_pointset(points)
    params = SolveParams(eps=eps, rho=rho, delta=delta, seed=seed)
    watch = Stopwatch()
    trials = max(1, math.ceil(math.log(1.0 / delta)))
    n0 = first_stage_size(eps, rho, c0)
    gamma = gamma_for(eps, rho)
    m_formula = jl_dimension(ps.n + 1, TRIAL_JL_DELTA, gamma, c)
    m_used = min(m_formula, ps.d, m_max)
    inner_eps = eps / 2.0
    inner_rho = rho * (1.0 - eps / 2.0)

    candidates = []
    trial_info = []
    pools = []
    for j in range(trials):
        rng = np.random.default_rng(seed + j)
        p0 = ps if ps.n <= n0 else uniform_sample(ps, n0, rng)
        if m_used >= ps.d:
            pi = identity_projection(ps.d)
            proj0 = p0
        else:
            pi = draw_projection(ps.d, m_used, gamma, "gaussian", rng)
            proj0 = project(pi, p0)
        n2 = second_stage_size(pi.m, eps, rho, c2)
        p2 = proj0 if proj0.n <= n2 else uniform_sample(proj0, n2, rng)
        x2, _, inner_alg = _inner_solve(p2, inner_eps, inner_rho,
                                        seed + j, lowdim_max)
        x1 = cross_space_shift(p0, proj0, x2)
        candidates.append(x1)
        pools.append(p0.points)
        trial_info.append({"n0": p0.n, "n2": p2.n, "inner": inner_alg,
                           "projection": pi.kind})

    union = np.concatenate(pools, axis=0)
    scores = kde_value(union, np.stack(candidates))
    best = int(np.argmax(scores))
    x = candidates[best]
    return ModeResult(
        x=x,
        value=kde(ps, x),
        algorithm="highdim",
        params=params,
        elapsed=watch.elapsed(),
        extra={
            "trials": trials,
            "picked": best,
            "gamma": gamma,
            "m_formula": m_formula,
            "m_used": int(m_used) if m_used < ps.d else ps.d,
            "first_stage": n0,
            "trial_info": trial_info,
        },
    )
