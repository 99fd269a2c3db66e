"""Lattice neighborhoods, truncated polynomials, and the level search."""

import math

import numpy as np
import pytest

from kdemode import (
    BudgetExceededError,
    as_pointset,
    build_truncated_poly,
    eval_truncated,
    grid_mode,
    grid_neighborhoods,
    kde_batch,
    kde_unnormalized,
    mode_low_dim,
    syspoly_feasible,
    syspoly_search,
    truncation_order,
)
from kdemode.polysolve import DEFAULT_S_MAX, GridSpec, bisection_steps, log_inv


def test_truncation_order_frozen_values():
    # pre-ceiling 36 e^2 = 266.006...,  36 e^2 ln 40 = 981.264...
    assert truncation_order(2.0, 4.0, 1, 1.0 / math.e, 1.0) == 267
    assert truncation_order(2.0, 4.0, 2, 0.5, 0.1, s_max=10**6) == 982


def test_truncation_order_linear_in_log():
    base = 36.0 * math.e**2 * math.log(10.0)
    big = 10**6
    assert truncation_order(2.0, 4.0, 1, 1.0, 0.1, s_max=big) == math.ceil(base)
    assert truncation_order(2.0, 4.0, 1, 1.0, 0.01, s_max=big) == math.ceil(2.0 * base)


def test_truncation_order_cap():
    assert truncation_order(2.0, 4.0, 3, 0.05, 0.05) == DEFAULT_S_MAX
    assert truncation_order(2.0, 4.0, 3, 0.05, 0.05, s_max=10**6) > DEFAULT_S_MAX


def test_truncation_order_rejects_small_radius():
    with pytest.raises(ValueError):
        truncation_order(0.3, 0.5, 1, 0.5, 0.5)


def test_poly_order_one_is_count():
    poly = build_truncated_poly(np.array([[0.0], [1.0], [2.0]]), 1)
    for x in (-3.0, 0.7, 9.0):
        assert eval_truncated(poly, np.array([x])) == pytest.approx(3.0, rel=1e-15)


def test_poly_hand_expansions():
    # 1 - t at t=1, then 1 - t + t^2/2 at t=1
    poly2 = build_truncated_poly(np.array([[0.0]]), 2)
    assert eval_truncated(poly2, np.array([1.0])) == pytest.approx(0.0, abs=1e-15)
    poly3 = build_truncated_poly(np.array([[0.0]]), 3)
    assert eval_truncated(poly3, np.array([1.0])) == pytest.approx(0.5, rel=1e-15)


def test_poly_center_contributes_one():
    centers = np.array([[0.5, -0.2], [4.0, 4.0]])
    poly = build_truncated_poly(centers, 5)
    rest = eval_truncated(build_truncated_poly(centers[1:], 5), centers[0])
    assert eval_truncated(poly, centers[0]) == pytest.approx(1.0 + rest, rel=1e-12)


def test_poly_coincident_centers_exact_count():
    centers = np.tile([[0.3, 0.7]], (4, 1))
    poly = build_truncated_poly(centers, 8)
    assert eval_truncated(poly, centers[0]) == pytest.approx(4.0, rel=1e-15)


def test_poly_batch_matches_scalar():
    rng = np.random.default_rng(7)
    centers = rng.normal(size=(6, 2))
    poly = build_truncated_poly(centers, 30)
    xs = rng.normal(size=(5, 2))
    vals = poly.eval_batch(xs)
    for i in range(5):
        assert vals[i] == pytest.approx(eval_truncated(poly, xs[i]), rel=1e-12)


def test_truncation_error_within_band():
    rng = np.random.default_rng(8)
    for case in range(10):
        v = (0.05, 0.1, 0.2)[case % 3]
        d = 1 + case % 2
        ell = math.sqrt(math.log(1.0 / v))
        q = rng.normal(size=d)
        k = 12
        dirs = rng.normal(size=(k, d))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        radii = 4.0 * ell * rng.random(k) ** (1.0 / d)
        members = q + dirs * radii[:, None]
        s = truncation_order(2.0, 4.0, d, v, 1.0)
        poly = build_truncated_poly(members, s)
        for _ in range(5):
            u = rng.normal(size=d)
            u /= np.linalg.norm(u)
            x = q + u * 2.0 * ell * rng.random() ** (1.0 / d)
            exact = kde_unnormalized(members, x, compensated=True)
            assert abs(eval_truncated(poly, x) - exact) <= k * v / 8.0


def test_syspoly_feasible_level_zero_and_impossible():
    eps, rho = 0.5, 0.2
    members = np.array([[0.0], [0.6], [1.1]])
    poly = build_truncated_poly(members, truncation_order(2.0, 4.0, 1, eps, rho))
    q = np.array([0.5])
    w = syspoly_feasible(poly, q, 2.0, eps, rho, 0.0)
    assert w is not None
    assert eval_truncated(poly, w) >= 0.0
    assert syspoly_feasible(poly, q, 2.0, eps, rho, 4.0) is None


def test_syspoly_feasible_single_center_high_level():
    eps, rho = 0.5, 0.2
    poly = build_truncated_poly(np.array([[0.25]]), truncation_order(2.0, 4.0, 1, eps, rho))
    w = syspoly_feasible(poly, np.array([0.25]), 4.0, eps, rho, 0.99)
    assert w is not None
    assert eval_truncated(poly, w) >= 0.99


def test_search_single_member():
    eps, rho = 0.3, 0.2
    pts = as_pointset(np.array([[0.7]]))
    x = syspoly_search(pts, np.array([0.5]), 2.0, 4.0, eps, rho)
    assert kde_unnormalized(pts, x) >= 1.0 - eps * rho / 2.0


def test_search_symmetric_pair():
    eps, rho = 0.3, 0.2
    pts = as_pointset(np.array([[-0.4], [0.4]]))
    x = syspoly_search(pts, np.array([0.0]), 2.0, 4.0, eps, rho)
    target = kde_unnormalized(pts, np.array([0.0]))
    assert kde_unnormalized(pts, x) >= target - 2.0 * eps * rho / 2.0


def test_search_random_2d_vs_dense_grid():
    rng = np.random.default_rng(9)
    eps, rho = 0.5, 0.3
    ell = math.sqrt(log_inv(eps, rho))
    for _ in range(3):
        k = int(rng.integers(3, 10))
        q = rng.normal(size=2)
        pts = as_pointset(q + rng.normal(size=(k, 2)) * 0.6)
        stats = {}
        x = syspoly_search(pts, q, 2.0, 4.0, eps, rho, stats=stats)
        assert stats["members"] == k
        g = np.linspace(-2.0 * ell, 2.0 * ell, 201)
        gx, gy = np.meshgrid(g, g)
        cand = np.column_stack([gx.ravel(), gy.ravel()]) + q
        cand = cand[((cand - q) ** 2).sum(axis=1) <= (2.0 * ell) ** 2]
        dense = kde_batch(pts.points, cand, normalized=False).max()
        assert kde_unnormalized(pts, x) >= dense - k * eps * rho / 2.0


def test_search_requires_nearby_points():
    with pytest.raises(ValueError):
        syspoly_search(np.array([[50.0]]), np.array([0.0]), 2.0, 4.0, 0.5, 0.3)


def test_bisection_steps():
    assert bisection_steps(100, 100, 0.3, 0.2) == 8
    assert bisection_steps(1, 100, 0.5, 0.5) == 0
    assert bisection_steps(200, 100, 0.3, 0.2) == 9


def test_neighborhoods_single_point_enumeration():
    eps, rho = 0.5, 0.3
    spec = GridSpec.for_params(eps, rho, 1)
    radius = 4.0 * math.sqrt(log_inv(eps, rho))
    nbs = grid_neighborhoods(np.array([[0.0]]), eps, rho)
    assert [nb.index for nb in nbs] == [(-2,), (-1,), (0,), (1,), (2,)]
    for nb in nbs:
        np.testing.assert_array_equal(nb.members, [0])
        np.testing.assert_allclose(nb.center, np.asarray(nb.index) * spec.width)
        assert abs(nb.center[0]) <= radius + 1e-12


def test_neighborhoods_2d_enumeration_oracle():
    eps, rho = 0.5, 0.3
    p = np.array([0.3, -0.8])
    spec = GridSpec.for_params(eps, rho, 2)
    w = spec.width
    radius = 4.0 * math.sqrt(log_inv(eps, rho))
    los = np.ceil((p - radius) / w).astype(int)
    his = np.floor((p + radius) / w).astype(int)
    expect = []
    for i in range(los[0], his[0] + 1):
        for j in range(los[1], his[1] + 1):
            center = np.array([i, j], dtype=np.float64) * w
            if ((center - p) ** 2).sum() <= radius * radius:
                expect.append((i, j))
    nbs = grid_neighborhoods(p[None, :], eps, rho)
    assert [nb.index for nb in nbs] == sorted(expect)


def test_neighborhoods_far_points_disjoint():
    nbs = grid_neighborhoods(np.array([[0.0], [1000.0]]), 0.5, 0.3)
    for nb in nbs:
        assert len(nb.members) == 1


def test_neighborhoods_translation_symmetry():
    eps, rho = 0.4, 0.25
    spec = GridSpec.for_params(eps, rho, 2)
    pts = np.random.default_rng(10).normal(size=(15, 2))
    base = grid_neighborhoods(pts, eps, rho)
    moved = grid_neighborhoods(pts + spec.width, eps, rho)
    assert [tuple(i + 1 for i in nb.index) for nb in base] == [nb.index for nb in moved]
    for a, b in zip(base, moved):
        np.testing.assert_array_equal(a.members, b.members)


def test_neighborhood_cell_budget():
    with pytest.raises(BudgetExceededError):
        grid_neighborhoods(np.zeros((1, 3)), 0.5, 0.3, max_cells_per_point=2)


def test_mode_low_dim_single_point():
    res = mode_low_dim(np.array([[0.0]]), 0.3, 0.2)
    assert res.value >= 1.0 - 0.3 * 0.2
    assert res.algorithm == "grid-poly"
    assert res.extra["neighborhoods"] >= 1


def test_mode_low_dim_coincident_clusters():
    rng = np.random.default_rng(11)
    pts = np.r_[rng.normal(0.0, 0.05, 120), rng.normal(0.02, 0.05, 80)][:, None]
    res = mode_low_dim(pts, 0.3, 0.2, seed=1)
    ref = grid_mode(pts, 0.3, 0.2)
    assert res.value >= ref.value - 0.3 * 0.2


def test_mode_low_dim_three_clusters_2d():
    rng = np.random.default_rng(12)
    means = np.array([[0.0, 0.0], [2.5, 0.5], [1.0, 3.0]])
    pts = np.vstack([m + rng.normal(0.0, 0.3, (67, 2)) for m in means])[:200]
    res = mode_low_dim(pts, 0.3, 0.2, seed=2)
    ref = grid_mode(pts, 0.3, 0.2)
    assert res.value >= ref.value - 0.3 * 0.2
    assert res.extra["solved"] <= res.extra["neighborhoods"]
