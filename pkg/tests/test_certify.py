import json

import pytest

from gfusion.tooling.certify import CaseResult, CertificationRun, emit_report, run_certification


def _strip_elapsed(report):
    rows = [json.loads(line) for line in report.splitlines()]
    for r in rows:
        r.pop("elapsed_ms")
    return rows


def test_duals_suite_passes():
    run = run_certification(CertificationRun("duals", 1, (4, 8), 25))
    assert len(run.results) == 2 * 2 * 25
    assert run.failed == 0


def test_quotient_suite_covers_negative_branch():
    run = run_certification(CertificationRun("quotient", 3, (3, 5), 8))
    assert run.ok
    negatives = [r for r in run.results if r.theorem_tag == "thm_4_5" and r.detail == "I=0 II=0 III=0"]
    assert negatives and all(r.verdict for r in negatives)
    assert all(r.case_id.endswith("/bessel_only") for r in negatives)


def test_zero_trials():
    run = run_certification(CertificationRun("all", 0, (4,), 0))
    assert run.results == () and run.ok
    assert emit_report(run, "machine") == ""
    assert emit_report(run, "human").endswith("0 passed / 0 failed\n")


def test_machine_report_is_deterministic():
    cfg = CertificationRun("all", 2**64 - 1, (3, 6), 3)
    a = emit_report(run_certification(cfg), "machine")
    b = emit_report(run_certification(cfg), "machine")
    assert _strip_elapsed(a) == _strip_elapsed(b)
    ids = [r["case_id"] for r in _strip_elapsed(a)]
    assert ids == sorted(ids)


def test_seed_changes_results():
    a = run_certification(CertificationRun("stability", 1, (4,), 2))
    b = run_certification(CertificationRun("stability", 2, (4,), 2))
    assert [r.residual for r in a.results] != [r.residual for r in b.results]


def test_single_passing_row_machine_record():
    run = CertificationRun("duals", 0, (2,), 1, (CaseResult("x/1", "eq_3_1", True, 1e-16, 0.002),))
    (line,) = emit_report(run, "machine").splitlines()
    assert json.loads(line) == {
        "case_id": "x/1", "theorem_tag": "eq_3_1", "verdict": True, "residual": 1e-16, "elapsed_ms": 2.0,
    }


def test_human_report_golden():
    rows = (
        CaseResult("a/1", "thm_4_1", True, 0.5, 0.001),
        CaseResult("b/2", "thm_4_2_I", False, float("inf"), 0.0, "NotAFrame"),
        CaseResult("c/3", "rem_4_3", True, 1e-9, 0.0),
    )
    text = emit_report(CertificationRun("stability", 0, (2,), 1, rows), "human")
    assert text == (
        "case_id  theorem_tag  verdict  residual   elapsed_ms  detail\n"
        "b/2      thm_4_2_I    FAIL     inf        0.00        NotAFrame\n"
        "a/1      thm_4_1      pass     5.000e-01  1.00\n"
        "c/3      rem_4_3      pass     1.000e-09  0.00\n"
        "2 passed / 1 failed\n"
    )


def test_config_validation():
    with pytest.raises(ValueError):
        CertificationRun("bogus", 0, (2,), 1)
    with pytest.raises(ValueError):
        CertificationRun("all", -1, (2,), 1)
