"""Compiled kernels against the pure NumPy fallback."""

import os
import subprocess
import sys

import numpy as np
import pytest

from kdemode import PointSet, available_backends
from kdemode import _pykern

HAVE_COMPILED = "compiled" in available_backends()

if HAVE_COMPILED:
    from kdemode import _ckern


def test_python_backend_always_available():
    assert "python" in available_backends()


def test_env_var_forces_python_backend():
    env = dict(os.environ, KDEMODE_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import kdemode; print(kdemode.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled backend not built")
def test_backends_agree_on_kde_value():
    rng = np.random.default_rng(0)
    for _ in range(10):
        n = int(rng.integers(1, 200))
        d = int(rng.integers(1, 8))
        pts = PointSet(rng.normal(size=(n, d)) * rng.uniform(0.2, 3.0))
        xs = rng.normal(size=(13, d)) * 2.0
        a = _pykern.kde_value(pts.points, xs)
        b = _ckern.kde_value(pts.points, xs)
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-300)


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled backend not built")
def test_backends_agree_on_meanshift_step():
    rng = np.random.default_rng(1)
    for _ in range(10):
        n = int(rng.integers(2, 150))
        d = int(rng.integers(1, 6))
        pts = PointSet(rng.normal(size=(n, d)))
        xs = rng.normal(size=(9, d)) * 2.0
        na, va = _pykern.meanshift_step(pts.points, xs)
        nb, vb = _ckern.meanshift_step(pts.points, xs)
        np.testing.assert_allclose(na, nb, rtol=1e-12, atol=1e-14)
        np.testing.assert_allclose(va, vb, rtol=1e-12)


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled backend not built")
def test_backends_agree_on_censored_bound():
    rng = np.random.default_rng(2)
    for _ in range(10):
        n = int(rng.integers(1, 150))
        d = int(rng.integers(1, 6))
        pts = PointSet(rng.normal(size=(n, d)) * 2.0)
        qs = rng.normal(size=(11, d)) * 2.0
        radius = rng.uniform(0.5, 4.0)
        a = _pykern.censored_kde_bound(pts.points, qs, radius)
        b = _ckern.censored_kde_bound(pts.points, qs, radius)
        np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-300)


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled backend not built")
def test_compiled_accepts_readonly_arrays():
    pts = PointSet(np.random.default_rng(3).normal(size=(20, 2)))
    assert not pts.points.flags.writeable
    vals = _ckern.kde_value(pts.points, pts.points[:4])
    assert vals.shape == (4,)


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled backend not built")
def test_dispatch_matches_both_sides_of_the_volume_cutoff():
    # small batches stay on the compiled loops, bulk work goes to BLAS;
    # either way the public entry point must agree with both backends
    from kdemode import _backend

    rng = np.random.default_rng(4)
    small = (rng.normal(size=(40, 2)), rng.normal(size=(10, 2)))
    bulk = (rng.normal(size=(1200, 50)), rng.normal(size=(600, 50)))
    for pts, xs in (small, bulk):
        assert pts.shape[0] * xs.shape[0] * pts.shape[1] != _backend._BULK_WORK
        got = _backend.kde_value(pts, xs)
        np.testing.assert_allclose(got, _pykern.kde_value(pts, xs), rtol=1e-12)
        np.testing.assert_allclose(got, _ckern.kde_value(pts, xs), rtol=1e-12)
