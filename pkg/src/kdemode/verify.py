"""Seeded verification suites behind `kdemode verify`.

Every check is a deterministic Monte-Carlo or exhaustive experiment with
an explicit pass condition and, where meaningful, a wall-clock budget.
Checks return plain dicts so the CLI can print one line per check and
dump the whole thing as JSON.
"""

import math
import time

import numpy as np

from . import dimred, meanshift, oracle, polysolve, rect2d
from .core import as_pointset, kde, kde_unnormalized
from .datasets import MixtureSpec

SUITE_NAMES = ("truncation", "meanshift", "jl", "counting", "depth",
               "end2end", "all")


def _report(name, passed, t0, budget_s, **details):
    return {
        "name": name,
        "passed": bool(passed),
        "elapsed_s": round(time.perf_counter() - t0, 3),
        "budget_s": budget_s,
        "details": details,
    }


def _unit_dirs(rng, count, d):
    dirs = rng.standard_normal((count, d))
    return dirs / np.maximum(np.linalg.norm(dirs, axis=1), 1e-300)[:, None]


def check_meanshift_monotone(seed=0):
    """One mean-shift step never lowers the kernel sum: 500 random cases
    across d in {1, 2, 5, 20}."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    dims = (1, 2, 5, 20)
    violations = 0
    worst = 0.0
    for case in range(500):
        d = dims[case % 4]
        n = int(rng.integers(5, 501))
        scale = rng.uniform(0.3, 2.0)
        pts = rng.standard_normal((n, d)) * scale
        if rng.random() < 0.5:
            pts[: n // 2] += rng.uniform(1.0, 4.0)
        y = rng.standard_normal(d) * scale * 1.5
        g0 = kde_unnormalized(pts, y)
        g1 = kde_unnormalized(pts, meanshift.mean_shift_step(pts, y))
        worst = min(worst, (g1 - g0) / g0)
        if g1 < g0 * (1.0 - 1e-12):
            violations += 1
    return _report("meanshift-monotonic", violations == 0, t0, 10.0,
                   cases=500, violations=violations,
                   worst_relative_drop=worst)


def check_truncation(seed=0):
    """Truncated polynomial vs exact kernel sum on 200 random
    neighborhoods (r=2, r'=4): error within |Q| * eps*rho / 8 inside the
    search ball."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    prods = (0.05, 0.1, 0.2)
    violations = 0
    cap_hits = 0
    worst_ratio = 0.0
    for case in range(200):
        v = prods[case % 3]
        d = int(rng.integers(1, 4))
        ell = math.sqrt(math.log(1.0 / v))
        q = rng.standard_normal(d)
        k = int(rng.integers(10, 41))
        radii = 4.0 * ell * rng.random(k) ** (1.0 / d)
        members = q + _unit_dirs(rng, k, d) * radii[:, None]
        s = polysolve.truncation_order(2.0, 4.0, d, v, 1.0)
        cap_hits += s == polysolve.DEFAULT_S_MAX
        poly = polysolve.build_truncated_poly(members, s)
        tol = k * v / 8.0
        for _ in range(10):
            r = 2.0 * ell * rng.random() ** (1.0 / d)
            x = q + _unit_dirs(rng, 1, d)[0] * r
            exact = kde_unnormalized(members, x, compensated=True)
            err = abs(polysolve.eval_truncated(poly, x) - exact)
            worst_ratio = max(worst_ratio, err / tol)
            if err > tol:
                violations += 1
    return _report("truncation-error", violations == 0, t0, 60.0,
                   neighborhoods=200, points_each=10, violations=violations,
                   order_cap_hits=cap_hits, worst_error_fraction=worst_ratio)


def check_log_power():
    """n^c stays below (log2 n)^(c * (log2 n)^3) for n = 4..2^16, c <= 3."""
    t0 = time.perf_counter()
    violations = 0
    min_margin = math.inf
    for e in range(2, 17):
        n = 2**e
        l = float(e)
        for c in (1, 2, 3):
            lhs = c * math.log(n)
            rhs = c * l**3 * math.log(l)
            min_margin = min(min_margin, rhs - lhs)
            if lhs > rhs:
                violations += 1
    return _report("log-power-growth", violations == 0, t0, 1.0,
                   checked=15 * 3, violations=violations,
                   min_log_margin=min_margin)


def _lowdim_instance(rng, i, d):
    ncomp = int(rng.integers(1, 4))
    means = rng.uniform(0.0, 5.0, (ncomp, d))
    if ncomp == 1:
        w = np.array([1.0])
    else:
        w = np.r_[0.6, np.full(ncomp - 1, 0.4 / (ncomp - 1))]
    spec = MixtureSpec(w, means, np.full(ncomp, 0.25))
    n = int(rng.integers(50, 301))
    return as_pointset(spec.sample(n, seed=1000 + i))


def check_lowdim(seed=0):
    """Grid/polynomial solver lands within an additive eps*rho of the
    exhaustive grid reference on 30 instances, d in {1, 2}."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    eps_opts = (0.3, 0.5)
    rho_opts = (0.2, 0.3)
    failures = 0
    min_slack = math.inf
    floor_ok = 0
    for i in range(30):
        d = 1 + (i % 2)
        eps = eps_opts[(i // 2) % 2]
        rho = rho_opts[(i // 4) % 2]
        ps = _lowdim_instance(rng, i, d)
        res = polysolve.mode_low_dim(ps, eps, rho, seed=i)
        ref = oracle.grid_mode(ps, eps, rho)
        floor_ok += ref.value >= rho
        slack = res.value - (ref.value - eps * rho)
        min_slack = min(min_slack, slack)
        if slack < 0.0:
            failures += 1
    return _report("lowdim-additive-gap", failures == 0, t0, 300.0,
                   instances=30, failures=failures, min_slack=min_slack,
                   density_floor_held=floor_ok)


def check_counting(seed=0):
    """Depth of the full implicit rectangle family sandwiches the
    density: value >= depth/(n m^2) >= value - eps*rho/3."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    violations = 0
    min_margin = math.inf
    for eps, rho in ((1.0, 0.5), (0.5, 0.5)):
        levels = rect2d.width_levels(eps, rho)
        for _ in range(50):
            n = int(rng.integers(5, 101))
            pts = rng.uniform(0.0, 3.0, (n, 2))
            fam = rect2d.rect_family(pts, levels)
            if rng.random() < 0.5:
                x = pts[int(rng.integers(n))] + rng.normal(0.0, 0.3, 2)
            else:
                x = rng.uniform(-1.0, 4.0, 2)
            est = fam.depth(x) / (n * levels.m**2)
            gb = kde(pts, x, compensated=True)
            upper = gb - est
            lower = est - (gb - eps * rho / 3.0)
            min_margin = min(min_margin, upper + 1e-12, lower + 1e-12)
            if upper < -1e-12 or lower < -1e-12:
                violations += 1
    return _report("depth-count-sandwich", violations == 0, t0, 30.0,
                   cases=100, violations=violations, min_margin=min_margin)


def _random_rects(rng, k):
    if rng.random() < 0.5:
        cx = rng.integers(0, 9, (k, 2)) * 0.5
        hw = rng.integers(0, 5, (k, 2)) * 0.25
    else:
        cx = rng.uniform(0.0, 8.0, (k, 2))
        hw = np.abs(rng.normal(0.0, 1.0, (k, 2)))
        hw[rng.random(k) < 0.1] = 0.0
    return np.column_stack([
        cx[:, 0] - hw[:, 0], cx[:, 0] + hw[:, 0],
        cx[:, 1] - hw[:, 1], cx[:, 1] + hw[:, 1],
    ])


def check_depth(seed=0):
    """Sweepline max depth is integer-exact against the corner-grid brute
    force on 500 random families, and its point attains the depth."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    violations = 0
    for _ in range(500):
        rects = _random_rects(rng, int(rng.integers(1, 301)))
        x, dep = rect2d.max_depth_point(rects)
        if dep != rect2d.brute_max_depth(rects):
            violations += 1
        elif rect2d.depth_at(rects, x) != dep:
            violations += 1
    return _report("sweepline-vs-brute", violations == 0, t0, 30.0,
                   families=500, violations=violations)


def check_end2end_2d(seed=0):
    """Rectangle-sampling 2-D solver reaches (1-eps) of the reference mode
    value in at least 80 of 100 seeded trials (eps=0.3, rho=0.2)."""
    t0 = time.perf_counter()
    eps, rho, delta = 0.3, 0.2, 0.2
    trials, need = 100, 80
    succ = 0
    floor_ok = 0
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        ncomp = 1 + (t % 2)
        w = [1.0] if ncomp == 1 else [0.6, 0.4]
        means = rng.uniform(0.0, 4.0, (ncomp, 2))
        sigma = rng.uniform(0.2, 0.3)
        spec = MixtureSpec(w, means, np.full(ncomp, sigma))
        pts = as_pointset(spec.sample(500, seed=int(rng.integers(2**32))))
        res = rect2d.mode_2d(pts, eps, rho, delta, seed=t)
        ref = oracle.multistart_meanshift_mode(pts, starts=16, seed=t,
                                               max_data_starts=64)
        floor_ok += ref.value >= rho
        succ += res.value >= (1.0 - eps) * ref.value
    return _report("mode2d-vs-oracle", succ >= need, t0, 180.0,
                   trials=trials, successes=succ, needed=need,
                   density_floor_held=floor_ok)


def check_jl_and_recovery(seed=0):
    """200 seeded projections at the default scaling: one-sided pairwise
    distortion plus the value sandwich, then the cross-space recovery
    inequality on every trial where no pair contracted."""
    t0 = time.perf_counter()
    eps, rho, delta = 0.5, 0.3, 0.1
    n, d, trials = 50, 16, 200
    gamma = dimred.gamma_for(eps, rho)
    m = dimred.jl_dimension(n + 1, delta, gamma)
    need = math.ceil((1.0 - delta) * trials)
    dist_ok = 0
    sandwich_ok = 0
    rec_checked = 0
    rec_viol = 0
    worst_margin = math.inf
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        means = rng.uniform(0.0, 3.0, (2, d))
        spec = MixtureSpec([0.5, 0.5], means, [0.3, 0.3])
        pts = as_pointset(spec.sample(n, seed=int(rng.integers(2**32))))
        pi = dimred.draw_projection(d, m, gamma, "gaussian", rng)
        proj = dimred.project(pi, pts)
        lo, hi = dimred.distortion_range(pts, proj)
        dist_ok += lo >= 1.0 and hi <= 1.0 + gamma

        orig_max = oracle.multistart_meanshift_mode(pts, starts=8, seed=t).value
        gram = proj.points @ proj.points.T
        alpha, _ = meanshift.multistart_gram(gram)
        x2 = alpha @ proj.points
        proj_max = kde_unnormalized(proj, x2) / n
        tol = 1e-7
        sandwich_ok += ((1.0 - eps / 2.0) * orig_max <= proj_max + tol
                        and proj_max <= orig_max + tol)

        if lo >= 1.0:
            rec_checked += 1
            x1 = meanshift.cross_space_shift(pts, proj, x2)
            margin = kde_unnormalized(pts, x1) - (n * proj_max - 1e-9)
            worst_margin = min(worst_margin, margin)
            if margin < 0.0:
                rec_viol += 1
    rep7 = _report("jl-onesided-sandwich",
                   dist_ok >= need and sandwich_ok >= need, t0, None,
                   trials=trials, m=m, gamma=gamma, needed=need,
                   distance_ok=dist_ok, sandwich_ok=sandwich_ok)
    rep8 = _report("jl-recovery", rec_viol == 0 and rec_checked > 0, t0, None,
                   expansive_trials=rec_checked, violations=rec_viol,
                   worst_margin=worst_margin)
    return rep7, rep8


def check_highdim(seed=0):
    """Subsample-project-solve-recover pipeline reaches (1-eps) of the
    multistart mean-shift reference on d=50 clusters in >= 24/30 trials."""
    t0 = time.perf_counter()
    eps, rho, delta = 0.5, 0.3, 0.2
    trials, need = 30, 24
    succ = 0
    floor_ok = 0
    m_used = None
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        center = rng.uniform(0.0, 2.0, 50)
        spec = MixtureSpec([1.0], center[None, :], [0.1])
        pts = as_pointset(spec.sample(1000, seed=int(rng.integers(2**32))))
        res = dimred.mode_high_dim(pts, eps, rho, delta, seed=t)
        m_used = res.extra["m_used"]
        ref = oracle.multistart_meanshift_mode(pts, starts=8, seed=t,
                                               max_data_starts=64)
        floor_ok += ref.value >= rho
        succ += res.value >= (1.0 - eps) * ref.value
    return _report("highdim-vs-oracle", succ >= need, t0, 600.0,
                   trials=trials, successes=succ, needed=need,
                   m_used=m_used, density_floor_held=floor_ok)


def run_suite(suite, seed=0):
    """Run one named suite (or 'all'); returns a JSON-ready dict."""
    if suite == "truncation":
        reports = [check_truncation(seed), check_log_power()]
    elif suite == "meanshift":
        reports = [check_meanshift_monotone(seed)]
    elif suite == "jl":
        reports = list(check_jl_and_recovery(seed))
    elif suite == "counting":
        reports = [check_counting(seed)]
    elif suite == "depth":
        reports = [check_depth(seed)]
    elif suite == "end2end":
        reports = [check_lowdim(seed), check_end2end_2d(seed),
                   check_highdim(seed)]
    elif suite == "all":
        reports = []
        for name in SUITE_NAMES[:-1]:
            reports.extend(run_suite(name, seed)["reports"])
    else:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITE_NAMES}")
    return {
        "suite": suite,
        "seed": seed,
        "passed": all(r["passed"] for r in reports),
        "reports": reports,
    }


def format_report_lines(result):
    lines = []
    for r in result["reports"]:
        status = "PASS" if r["passed"] else "FAIL"
        info = " ".join(f"{k}={v}" for k, v in r["details"].items())
        lines.append(f"{status} {r['name']} ({r['elapsed_s']}s) {info}")
    overall = "PASS" if result["passed"] else "FAIL"
    lines.append(f"{overall} suite={result['suite']}")
    return lines
