"""Command-line front end.

    kdemode generate --out pts.csv --n 500 --seed 7 \
        --spec '{"weights":[1.0],"means":[[0,0]],"scales":[0.3]}'
    kdemode solve --input pts.csv --algorithm rect2d --eps 0.3 --rho 0.2
    kdemode verify end2end --seed 0 --output report.json

Exit codes: 0 success, 1 verification failure, 2 parameter or input
errors, 3 evaluation budget exceeded.
"""

import argparse
import json
import sys

from .core import BudgetExceededError
from .datasets import MixtureSpec, generate_dataset, load_points, sidecar_path
from .dimred import mode_high_dim
from .oracle import grid_mode, multistart_meanshift_mode
from .polysolve import mode_low_dim
from .rect2d import mode_2d
from .verify import SUITE_NAMES, format_report_lines, run_suite

ALGORITHMS = ("meanshift", "grid-poly", "highdim", "rect2d",
              "oracle-grid", "oracle-ms")


def _parse_overrides(pairs):
    out = {}
    for pair in pairs or []:
        key, sep, raw = pair.partition("=")
        if not sep or not key:
            raise ValueError(f"override {pair!r} is not key=value")
        out[key] = raw
    return out


def _pick(overrides, allowed):
    """Coerce recognized overrides; anything left over is an error."""
    kwargs = {}
    for key, raw in overrides.items():
        if key not in allowed:
            raise ValueError(
                f"unknown constant {key!r}; this algorithm accepts "
                f"{sorted(allowed)}"
            )
        try:
            kwargs[key] = allowed[key](raw)
        except ValueError:
            raise ValueError(f"constant {key!r} needs a {allowed[key].__name__}")
    return kwargs


def _cmd_generate(args):
    if args.spec is not None:
        spec_data = json.loads(args.spec)
    else:
        with open(args.spec_file) as fh:
            spec_data = json.load(fh)
    spec = MixtureSpec.from_dict(spec_data)
    generate_dataset(spec, args.n, args.seed, args.out)
    print(json.dumps({
        "out": args.out,
        "sidecar": sidecar_path(args.out),
        "n": args.n,
        "d": spec.d,
        "seed": args.seed,
    }, indent=2))
    return 0


def _cmd_solve(args):
    pts = load_points(args.input)
    ov = _parse_overrides(args.constant_overrides)
    eps, rho, delta, seed = args.eps, args.rho, args.delta, args.seed
    algo = args.algorithm
    if algo == "grid-poly":
        res = mode_low_dim(pts, eps, rho, seed=seed,
                           **_pick(ov, {"s_max": int}))
    elif algo == "highdim":
        res = mode_high_dim(pts, eps, rho, delta, seed=seed,
                            **_pick(ov, {"c": float, "c0": float, "c2": float,
                                         "m_max": int, "lowdim_max": int}))
    elif algo == "rect2d":
        res = mode_2d(pts, eps, rho, delta, seed=seed,
                      **_pick(ov, {"c": float}))
    elif algo == "oracle-grid":
        res = grid_mode(pts, eps, rho, **_pick(ov, {"max_grid": int}))
    elif algo == "oracle-ms":
        res = multistart_meanshift_mode(
            pts, seed=seed,
            **_pick(ov, {"starts": int, "iters": int, "max_data_starts": int}))
    else:
        res = multistart_meanshift_mode(
            pts, starts=16, seed=seed, max_data_starts=256,
            **_pick(ov, {"starts": int, "iters": int, "max_data_starts": int}))
        res.algorithm = "meanshift"

    payload = {
        "algorithm": res.algorithm,
        "x": [float(v) for v in res.x],
        "value": res.value,
        "eps": eps,
        "rho": rho,
        "delta": delta,
        "seed": seed,
        "n": pts.n,
        "d": pts.d,
        "m_used": res.extra.get("m_used"),
        "elapsed_ms": round(res.elapsed * 1000.0, 3),
    }
    text = json.dumps(payload, indent=2)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _cmd_verify(args):
    result = run_suite(args.suite, seed=args.seed)
    for line in format_report_lines(result):
        print(line)
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(result, fh, indent=2)
            fh.write("\n")
    return 0 if result["passed"] else 1


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="kdemode",
        description="Approximate mode finding for Gaussian kernel densities.",
    )
    sub = parser.add_subparsers(dest="command")

    gen = sub.add_parser("generate", help="sample a Gaussian mixture to CSV")
    gen.add_argument("--out", required=True, help="output CSV path")
    gen.add_argument("--n", type=int, required=True, help="number of points")
    gen.add_argument("--seed", type=int, default=0)
    src = gen.add_mutually_exclusive_group(required=True)
    src.add_argument("--spec", help="mixture spec as inline JSON")
    src.add_argument("--spec-file", help="mixture spec as a JSON file")
    gen.set_defaults(func=_cmd_generate)

    sol = sub.add_parser("solve", help="run a solver on a CSV point set")
    sol.add_argument("--input", required=True, help="input CSV path")
    sol.add_argument("--output", help="write the result JSON here")
    sol.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    sol.add_argument("--eps", type=float, default=0.3)
    sol.add_argument("--rho", type=float, default=0.2)
    sol.add_argument("--delta", type=float, default=0.1)
    sol.add_argument("--seed", type=int, default=0)
    sol.add_argument("--constant-overrides", nargs="*", metavar="KEY=VALUE",
                     help="override size constants, e.g. c=2 m_max=8")
    sol.set_defaults(func=_cmd_solve)

    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument("suite", choices=SUITE_NAMES)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--output", help="write the JSON report here")
    ver.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except BudgetExceededError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (ValueError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
