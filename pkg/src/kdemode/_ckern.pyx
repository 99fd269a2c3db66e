# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: kernel sums, mean-shift steps, censored bounds."""

from libc.math cimport exp, sqrt

import numpy as np

BACKEND_NAME = "compiled"


def kde_value(points, xs):
    """Sum of exp(-||x - p||^2) over all p, for each row x of xs."""
    P = np.ascontiguousarray(points, dtype=np.float64)
    X = np.ascontiguousarray(xs, dtype=np.float64)
    out = np.empty(X.shape[0], dtype=np.float64)
    _kde_value(P, X, out)
    return out


def meanshift_step(points, xs):
    """One weighted-mean step from each row of xs.

    Returns (new_xs, vals) where vals[i] is the kernel sum at the input
    point xs[i].  Weights are computed with the squared distances shifted
    by their minimum so far-away starts do not underflow to 0/0.
    """
    P = np.ascontiguousarray(points, dtype=np.float64)
    X = np.ascontiguousarray(xs, dtype=np.float64)
    new = np.empty_like(X)
    vals = np.empty(X.shape[0], dtype=np.float64)
    _meanshift_step(P, X, new, vals)
    return new, vals


def censored_kde_bound(points, centers, double slack):
    """Sum of exp(-max(0, ||c - p|| - slack)^2) over p, per center c.

    Upper-bounds the kernel sum anywhere within distance `slack` of c.
    """
    P = np.ascontiguousarray(points, dtype=np.float64)
    C = np.ascontiguousarray(centers, dtype=np.float64)
    out = np.empty(C.shape[0], dtype=np.float64)
    _censored_bound(P, C, slack, out)
    return out


cdef void _kde_value(const double[:, ::1] P, const double[:, ::1] X, double[::1] out):
    cdef Py_ssize_t n = P.shape[0], d = P.shape[1], B = X.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double acc, dd, diff
    for i in range(B):
        acc = 0.0
        for j in range(n):
            dd = 0.0
            for k in range(d):
                diff = X[i, k] - P[j, k]
                dd += diff * diff
            acc += exp(-dd)
        out[i] = acc


cdef void _meanshift_step(const double[:, ::1] P, const double[:, ::1] X,
                          double[:, ::1] new, double[::1] vals):
    cdef Py_ssize_t n = P.shape[0], d = P.shape[1], B = X.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double dd, diff, dmin, w, wsum
    cdef double[::1] dists = np.empty(n, dtype=np.float64)
    for i in range(B):
        dmin = 1e308
        for j in range(n):
            dd = 0.0
            for k in range(d):
                diff = X[i, k] - P[j, k]
                dd += diff * diff
            dists[j] = dd
            if dd < dmin:
                dmin = dd
        wsum = 0.0
        for k in range(d):
            new[i, k] = 0.0
        for j in range(n):
            w = exp(dmin - dists[j])
            wsum += w
            for k in range(d):
                new[i, k] += w * P[j, k]
        for k in range(d):
            new[i, k] /= wsum
        vals[i] = exp(-dmin) * wsum


cdef void _censored_bound(const double[:, ::1] P, const double[:, ::1] C, double slack,
                          double[::1] out):
    cdef Py_ssize_t n = P.shape[0], d = P.shape[1], B = C.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double acc, dd, diff, t
    for i in range(B):
        acc = 0.0
        for j in range(n):
            dd = 0.0
            for k in range(d):
                diff = C[i, k] - P[j, k]
                dd += diff * diff
            t = sqrt(dd) - slack
            if t <= 0.0:
                acc += 1.0
            else:
                acc += exp(-t * t)
        out[i] = acc
