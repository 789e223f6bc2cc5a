import pytest

ACCEPTANCE = {
    "test_frame_operator_identity": "1 frame operator identity",
    "test_projection_identities": "2 projection identities",
    "test_bessel_bound_equals_synthesis_norm": "3 Bessel bound = synthesis norm squared",
    "test_transform_certificates_and_identities": "4 transform certificates",
    "test_canonical_dual_operator_and_bounds": "5 canonical dual",
    "test_transported_dual_reconstruction": "6 transported dual reconstruction",
    "test_mixed_synthesis_bound": "7 mixed synthesis bound",
    "test_dual_perturbation_bounds": "8 dual perturbation bounds",
    "test_quotient_condition_agreement": "9 quotient condition agreement",
    "test_tooling_contracts": "10 tooling contracts",
}

_outcomes = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.split("::")[-1]
    if "test_acceptance.py" in report.nodeid and name in ACCEPTANCE:
        if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
            _outcomes[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for name, label in ACCEPTANCE.items():
        if name in _outcomes:
            verdict = "PASS" if _outcomes[name] == "passed" else "FAIL"
            terminalreporter.write_line(f"criterion {label}: {verdict}")
