"""Provably accurate approximate mode finding for Gaussian kernel
density estimates.

The density of a point set P is kde(P, x) = (1/|P|) sum_p exp(-||x-p||^2).
Given a floor rho on the mode's density, the solvers here return a point
whose density is within a (1 - eps) factor (or an additive eps*rho) of
the true maximum:

- mode_low_dim: grid neighborhoods + truncated-polynomial level search,
  additive guarantee, dimensions 1-3.
- mode_2d: rectangle-depth sampling with a sweepline, the fast planar
  special case.
- mode_high_dim: subsample, random-project, solve small, lift back.
- reduce_and_recover: the projection step alone, for custom inner
  solvers.
- Oracles (grid_mode, multistart_meanshift_mode) serve as references.

Array kernels run through a compiled extension when it is available; set
KDEMODE_PURE_PYTHON=1 to force the NumPy fallback.
"""

from ._backend import BACKEND, available_backends
from .core import (
    BudgetExceededError,
    ModeResult,
    PointSet,
    SolveParams,
    as_pointset,
    kde,
    kde_batch,
    kde_unnormalized,
    kernel,
    search_radius,
)
from .coresets import (
    CoresetSpec,
    additive_sample_size,
    relative_sample_size,
    uniform_sample,
)
from .datasets import MixtureSpec, generate_dataset, load_points, save_points
from .dimred import (
    Projection,
    distortion_range,
    draw_projection,
    gamma_for,
    identity_projection,
    jl_dimension,
    mode_high_dim,
    pairwise_expansive,
    project,
    reduce_and_recover,
)
from .meanshift import (
    cross_space_shift,
    mean_shift,
    mean_shift_batch,
    mean_shift_step,
    multistart_gram,
)
from .oracle import dense_ball_max, grid_mode, multistart_meanshift_mode
from .polysolve import (
    TruncatedTaylorPoly,
    build_truncated_poly,
    eval_truncated,
    grid_neighborhoods,
    mode_low_dim,
    syspoly_feasible,
    syspoly_search,
    truncation_order,
)
from .rect2d import (
    Rect,
    RectFamily,
    WidthLevels,
    depth_at,
    max_depth_point,
    mode_2d,
    rect_family,
    sample_rectangles,
    width_levels,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BudgetExceededError",
    "CoresetSpec",
    "MixtureSpec",
    "ModeResult",
    "PointSet",
    "Projection",
    "Rect",
    "RectFamily",
    "SolveParams",
    "TruncatedTaylorPoly",
    "WidthLevels",
    "additive_sample_size",
    "as_pointset",
    "available_backends",
    "build_truncated_poly",
    "cross_space_shift",
    "dense_ball_max",
    "depth_at",
    "distortion_range",
    "draw_projection",
    "eval_truncated",
    "gamma_for",
    "generate_dataset",
    "grid_mode",
    "grid_neighborhoods",
    "identity_projection",
    "jl_dimension",
    "kde",
    "kde_batch",
    "kde_unnormalized",
    "kernel",
    "load_points",
    "max_depth_point",
    "mean_shift",
    "mean_shift_batch",
    "mean_shift_step",
    "mode_2d",
    "mode_high_dim",
    "mode_low_dim",
    "multistart_gram",
    "multistart_meanshift_mode",
    "pairwise_expansive",
    "project",
    "rect_family",
    "reduce_and_recover",
    "relative_sample_size",
    "sample_rectangles",
    "save_points",
    "search_radius",
    "syspoly_feasible",
    "syspoly_search",
    "truncation_order",
    "uniform_sample",
    "width_levels",
]
