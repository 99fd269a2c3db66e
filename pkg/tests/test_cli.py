"""Command-line round-trips, result schema, and exit codes."""

import json

import numpy as np
import pytest

from kdemode import MixtureSpec, generate_dataset, kde, load_points, save_points
from kdemode.cli import main

RESULT_KEYS = {"algorithm", "x", "value", "eps", "rho", "delta", "seed",
               "n", "d", "m_used", "elapsed_ms"}


def _gen(tmp_path, name="pts.csv", n=150, d=2, seed=3):
    if d == 2:
        spec = MixtureSpec([0.6, 0.4], [[0.5, 1.0], [3.0, 2.5]], [0.25, 0.25])
    else:
        spec = MixtureSpec([1.0], [[0.0] * d], [0.5])
    path = tmp_path / name
    generate_dataset(spec, n, seed, path)
    return path


def test_generate_then_solve_round_trip(tmp_path, capsys):
    csv = tmp_path / "data.csv"
    spec_json = json.dumps({"weights": [0.6, 0.4],
                            "means": [[0.5, 1.0], [3.0, 2.5]],
                            "scales": [0.25, 0.25]})
    assert main(["generate", "--spec", spec_json, "--n", "200",
                 "--seed", "3", "--out", str(csv)]) == 0
    meta = json.loads(capsys.readouterr().out)
    assert meta["n"] == 200 and meta["d"] == 2

    out = tmp_path / "res.json"
    assert main(["solve", "--input", str(csv), "--algorithm", "rect2d",
                 "--eps", "0.3", "--rho", "0.2", "--delta", "0.2",
                 "--seed", "0", "--output", str(out)]) == 0
    res = json.loads(out.read_text())
    assert set(res) == RESULT_KEYS
    pts = load_points(csv)
    assert kde(pts, np.asarray(res["x"])) == pytest.approx(res["value"], abs=1e-12)
    assert res["m_used"] is None
    assert res["elapsed_ms"] >= 0.0

    side = json.loads((tmp_path / "data.csv.json").read_text())
    assert MixtureSpec.from_dict(side["spec"]).d == 2


def test_solve_oracle_grid_single_point(tmp_path, capsys):
    csv = tmp_path / "one.csv"
    save_points(csv, np.array([[0.0, 0.0]]))
    assert main(["solve", "--input", str(csv), "--algorithm", "oracle-grid",
                 "--eps", "0.5", "--rho", "0.3"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["value"] == pytest.approx(1.0, abs=1e-9)


def test_solve_rect2d_rejects_3d(tmp_path, capsys):
    csv = _gen(tmp_path, d=3, n=20)
    assert main(["solve", "--input", str(csv), "--algorithm", "rect2d",
                 "--eps", "0.3", "--rho", "0.2"]) == 2
    assert "error" in capsys.readouterr().err


def test_solve_missing_file(tmp_path, capsys):
    assert main(["solve", "--input", str(tmp_path / "nope.csv"),
                 "--algorithm", "rect2d", "--eps", "0.3", "--rho", "0.2"]) == 2
    capsys.readouterr()


def test_solve_invalid_eps(tmp_path, capsys):
    csv = _gen(tmp_path)
    assert main(["solve", "--input", str(csv), "--algorithm", "rect2d",
                 "--eps", "1.5", "--rho", "0.2"]) == 2
    capsys.readouterr()


def test_grid_poly_within_band_of_oracle(tmp_path, capsys):
    csv = _gen(tmp_path, n=120)
    eps, rho = 0.3, 0.2
    values = {}
    for algo in ("grid-poly", "oracle-grid"):
        assert main(["solve", "--input", str(csv), "--algorithm", algo,
                     "--eps", str(eps), "--rho", str(rho)]) == 0
        values[algo] = json.loads(capsys.readouterr().out)["value"]
    assert values["grid-poly"] >= values["oracle-grid"] - eps * rho
    assert values["grid-poly"] <= values["oracle-grid"] + eps * rho


def test_highdim_reports_m_used(tmp_path, capsys):
    csv = tmp_path / "wide.csv"
    rng = np.random.default_rng(6)
    save_points(csv, rng.uniform(0.0, 2.0, 20) + 0.1 * rng.standard_normal((100, 20)))
    assert main(["solve", "--input", str(csv), "--algorithm", "highdim",
                 "--eps", "0.5", "--rho", "0.3", "--delta", "0.2"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert isinstance(res["m_used"], int)
    assert 1 <= res["m_used"] <= 12


def test_meanshift_label(tmp_path, capsys):
    csv = _gen(tmp_path, n=60)
    assert main(["solve", "--input", str(csv), "--algorithm", "meanshift",
                 "--eps", "0.3", "--rho", "0.2"]) == 0
    assert json.loads(capsys.readouterr().out)["algorithm"] == "meanshift"


def test_constant_overrides(tmp_path, capsys):
    csv = _gen(tmp_path, n=60)
    assert main(["solve", "--input", str(csv), "--algorithm", "oracle-ms",
                 "--eps", "0.3", "--rho", "0.2",
                 "--constant-overrides", "starts=2", "iters=5"]) == 0
    capsys.readouterr()
    assert main(["solve", "--input", str(csv), "--algorithm", "oracle-ms",
                 "--eps", "0.3", "--rho", "0.2",
                 "--constant-overrides", "bogus=1"]) == 2
    assert "bogus" in capsys.readouterr().err


def test_budget_exceeded_exit_code(tmp_path, capsys):
    csv = _gen(tmp_path, n=60)
    assert main(["solve", "--input", str(csv), "--algorithm", "oracle-grid",
                 "--eps", "0.3", "--rho", "0.2",
                 "--constant-overrides", "max_grid=10"]) == 3
    assert "error" in capsys.readouterr().err


def test_verify_suite_passes(capsys):
    assert main(["verify", "meanshift", "--seed", "0"]) == 0
    out = capsys.readouterr().out
    assert "PASS suite=meanshift" in out
    assert "meanshift-monotonic" in out


def test_verify_writes_report(tmp_path, capsys):
    report = tmp_path / "rep.json"
    assert main(["verify", "counting", "--seed", "0",
                 "--output", str(report)]) == 0
    capsys.readouterr()
    data = json.loads(report.read_text())
    assert data["passed"] is True
    assert data["reports"][0]["details"]["cases"] == 100


def test_verify_unknown_suite_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "everything"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_no_subcommand_prints_help(capsys):
    assert main([]) == 2
    assert "usage" in capsys.readouterr().out.lower()


def test_generate_requires_spec(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["generate", "--out", str(tmp_path / "x.csv"), "--n", "5"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_generate_spec_file(tmp_path, capsys):
    spec_file = tmp_path / "spec.json"
    spec_file.write_text(json.dumps({"weights": [1.0], "means": [[0.0]],
                                     "scales": [0.3]}))
    csv = tmp_path / "gen.csv"
    assert main(["generate", "--spec-file", str(spec_file), "--n", "25",
                 "--seed", "1", "--out", str(csv)]) == 0
    capsys.readouterr()
    assert load_points(csv).n == 25


def test_generate_bad_json_exits_2(tmp_path, capsys):
    assert main(["generate", "--spec", "{not json", "--n", "5",
                 "--out", str(tmp_path / "x.csv")]) == 2
    capsys.readouterr()
