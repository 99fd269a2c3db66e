"""Acceptance gate: ten solver-level criteria, one test each.

Run with `pytest -v` so every criterion shows its own pass/fail line;
each test also prints the measured numbers of its check.  Criteria 7
and 8 share one projection experiment through a module-scoped fixture.
"""

import pytest

from kdemode import verify

SEED = 0


def _check(rep):
    status = "PASS" if rep["passed"] else "FAIL"
    info = " ".join(f"{k}={v}" for k, v in rep["details"].items())
    budget = "" if rep["budget_s"] is None else f" budget={rep['budget_s']}s"
    print(f"{status} {rep['name']} elapsed={rep['elapsed_s']}s{budget} {info}")
    assert rep["passed"], rep
    if rep["budget_s"] is not None:
        assert rep["elapsed_s"] <= rep["budget_s"], rep


def test_criterion_01_meanshift_monotonic():
    rep = verify.check_meanshift_monotone(SEED)
    assert rep["details"]["cases"] == 500
    assert rep["details"]["violations"] == 0
    _check(rep)


def test_criterion_02_truncation_error():
    rep = verify.check_truncation(SEED)
    assert rep["details"]["neighborhoods"] == 200
    assert "order_cap_hits" in rep["details"]
    _check(rep)


def test_criterion_03_lowdim_additive_gap():
    rep = verify.check_lowdim(SEED)
    assert rep["details"]["instances"] == 30
    assert rep["details"]["failures"] == 0
    assert rep["details"]["min_slack"] >= 0.0
    _check(rep)


def test_criterion_04_depth_count_sandwich():
    rep = verify.check_counting(SEED)
    assert rep["details"]["cases"] == 100
    assert rep["details"]["violations"] == 0
    _check(rep)


def test_criterion_05_sweepline_exact():
    rep = verify.check_depth(SEED)
    assert rep["details"]["families"] == 500
    assert rep["details"]["violations"] == 0
    _check(rep)


def test_criterion_06_mode2d_end_to_end():
    rep = verify.check_end2end_2d(SEED)
    assert rep["details"]["trials"] == 100
    assert rep["details"]["needed"] == 80
    _check(rep)


@pytest.fixture(scope="module")
def jl_reports():
    return verify.check_jl_and_recovery(SEED)


def test_criterion_07_jl_one_sided_sandwich(jl_reports):
    rep = jl_reports[0]
    assert rep["details"]["trials"] == 200
    assert rep["details"]["distance_ok"] >= rep["details"]["needed"]
    assert rep["details"]["sandwich_ok"] >= rep["details"]["needed"]
    _check(rep)


def test_criterion_08_cross_space_recovery(jl_reports):
    rep = jl_reports[1]
    assert rep["details"]["expansive_trials"] > 0
    assert rep["details"]["violations"] == 0
    _check(rep)


def test_criterion_09_highdim_pipeline():
    rep = verify.check_highdim(SEED)
    assert rep["details"]["trials"] == 30
    assert rep["details"]["needed"] == 24
    _check(rep)


def test_criterion_10_log_power_growth():
    rep = verify.check_log_power()
    assert rep["details"]["violations"] == 0
    _check(rep)
