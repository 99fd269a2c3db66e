"""Compare the compiled and pure-NumPy array kernels.

Run from the repository root after an editable install:

    python benchmarks/bench_kernels.py

Imports both backends directly, so the timings are unaffected by which
one the package selected at import time.
"""

import time

import numpy as np

from kdemode import _pykern

try:
    from kdemode import _ckern
except ImportError:
    _ckern = None

SIZES = (
    (200, 100, 2),
    (2000, 500, 2),
    (20000, 500, 3),
    (2000, 1000, 50),
)
REPEATS = 5


def _time(fn, *args):
    best = float("inf")
    for _ in range(REPEATS):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    backends = [("python", _pykern)]
    if _ckern is not None:
        backends.append(("compiled", _ckern))
    else:
        print("compiled backend unavailable; timing the fallback only\n")

    header = f"{'kernel':<20}{'B':>7}{'n':>6}{'d':>4}"
    header += "".join(f"{name:>12}" for name, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))

    rng = np.random.default_rng(0)
    for b, n, d in SIZES:
        points = rng.standard_normal((n, d))
        xs = rng.standard_normal((b, d))
        for kernel, args in (
            ("kde_value", (points, xs)),
            ("meanshift_step", (points, xs)),
            ("censored_kde_bound", (points, xs, 0.5)),
        ):
            times = [_time(getattr(mod, kernel), *args) for _, mod in backends]
            row = f"{kernel:<20}{b:>7}{n:>6}{d:>4}"
            row += "".join(f"{t * 1e3:>10.2f}ms" for t in times)
            if len(times) == 2:
                row += f"{times[0] / times[1]:>9.1f}x"
            print(row)
        print()

    for kernel in ("kde_value", "meanshift_step"):
        pts = rng.standard_normal((300, 3))
        qs = rng.standard_normal((50, 3))
        ref = getattr(_pykern, kernel)(pts, qs)
        for name, mod in backends[1:]:
            got = getattr(mod, kernel)(pts, qs)
            ref0 = ref[0] if isinstance(ref, tuple) else ref
            got0 = got[0] if isinstance(got, tuple) else got
            err = float(np.max(np.abs(np.asarray(got0) - np.asarray(ref0))))
            print(f"max |{name} - python| for {kernel}: {err:.3e}")

    if _ckern is not None:
        from kdemode import _backend

        print(
            f"\npackage dispatch: compiled when B*n*d <= {_backend._BULK_WORK:,},"
            " NumPy above"
        )


if __name__ == "__main__":
    main()
