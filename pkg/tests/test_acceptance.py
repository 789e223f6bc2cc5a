"""Acceptance criteria, one test per criterion, at the stated counts and tolerances.

Random cases span dims 2-32 with at most 16 members.  A summary line per
criterion is printed at the end of the pytest run (see conftest.py).
"""

import json

import numpy as np

from gfusion import (
    BoundCertificate,
    CertificateKind,
    DirectSumVector,
    canonical_dual,
    conjugate_transform,
    conjugated_family,
    dual_stability_report,
    k_dual_transform,
    member_map_transform,
    mixed_synthesis_check,
    optimal_bounds,
    optimal_k_lower_bound,
    projected_dual_transform,
    pull_back_transform,
    quadratic_form,
    quotient_equivalence_report,
    reconstruct,
    synthesis_matrix,
    transported_dual,
    verify_certificate,
    verify_dual_operator,
)
from gfusion.linalg import projection_identity_check
from gfusion.tooling.certify import CertificationRun, emit_report, run_certification
from gfusion.tooling.cli import main
from gfusion.tooling.generate import (
    Profile,
    complex_gaussian,
    perturbed_family,
    random_family,
    random_invertible,
    random_subspace,
    random_unitary,
)
from gfusion.tooling.specfile import dump_spec, parse_spec

from families import f0, f0_document, f0_scaled

DIMS = (2, 3, 4, 5, 6, 8, 12, 16, 24, 32)
MARGIN_TOL = 1e-8


def cases(tag, count, profiles=(Profile.WELL_CONDITIONED,)):
    """``count`` seeded (rng, family, dim) triples cycling through DIMS and profiles."""
    for i in range(count):
        rng = np.random.default_rng(np.random.SeedSequence([sum(map(ord, tag)), i]))
        dim = DIMS[i % len(DIMS)]
        members = int(rng.integers(3, 17))
        profile = profiles[i % len(profiles)]
        fam = random_family(int(rng.integers(2**63)), dim, members, spectrum_profile=profile)
        yield rng, fam, dim


def margins_ok(cert):
    return cert.verdict and all(m >= -MARGIN_TOL for m in cert.margins if m is not None)


def test_frame_operator_identity():
    checked = 0
    for rng, fam, dim in cases("frame_operator", 100, tuple(Profile)):
        S = fam.frame_operator.array
        T = synthesis_matrix(fam)
        s_norm = np.linalg.norm(S, 2)
        assert np.linalg.norm(S - T @ T.conj().T, 2) <= 1e-9 * (1 + s_norm)
        for _ in range(100):
            f = complex_gaussian(rng, dim)
            ref = float(np.vdot(f, S @ f).real)
            got = quadratic_form(fam, f)
            assert abs(got - ref) <= 1e-9 * abs(ref)
            checked += 1
    assert checked == 10_000


def test_projection_identities():
    for i in range(100):
        rng = np.random.default_rng([1, i])
        n = DIMS[i % len(DIMS)]
        V = random_subspace(rng, n, int(rng.integers(1, n + 1)))
        chk = projection_identity_check(random_invertible(rng, n), V)
        assert chk.residual <= 1e-10
        chk = projection_identity_check(random_unitary(rng, n), V)
        assert chk.residual <= 1e-10
        assert chk.unitary_variant is not None and chk.unitary_variant[1] <= 1e-10


def test_bessel_bound_equals_synthesis_norm():
    for _, fam, _ in cases("bessel_norm", 100, tuple(Profile)):
        B = optimal_bounds(fam).upper
        t = np.linalg.norm(synthesis_matrix(fam), 2)
        assert abs(B - t**2) <= 1e-8 * B


def test_transform_certificates_and_identities():
    for rng, fam, n in cases("transforms", 100):
        U, K = random_invertible(rng, n), random_invertible(rng, n)
        bounds = (optimal_k_lower_bound(fam, K), optimal_bounds(fam).upper)
        r = conjugate_transform(fam, U, K, bounds, MARGIN_TOL)
        assert margins_ok(r.guaranteed)
        moved = (optimal_k_lower_bound(r.output, K), optimal_bounds(r.output).upper)
        assert margins_ok(pull_back_transform(r.output, fam, U, K, moved, MARGIN_TOL).guaranteed)

        r = k_dual_transform(fam, random_invertible(rng, n), MARGIN_TOL)
        assert margins_ok(r.guaranteed)
        assert r.checks["operator_identity"] <= 1e-8

        V = random_subspace(rng, n, int(rng.integers(1, n + 1)))
        r = projected_dual_transform(fam, V, MARGIN_TOL)
        assert margins_ok(r.guaranteed) and r.checks["optimal_lower"] is not None

        T = random_invertible(rng, n)
        maps = [random_invertible(rng, c) for c in fam.codomain_dims]
        r = member_map_transform(fam, T, maps, np.eye(n), optimal_bounds(fam)[:2], MARGIN_TOL)
        assert margins_ok(r.guaranteed)
        assert r.checks["assembly_identity"] <= 1e-8

    I2 = np.eye(2)
    r = conjugate_transform(f0(), np.diag([2.0, 1.0]), I2, (1.0, 4.0))
    assert np.max(np.abs(r.output.frame_operator.array - np.diag([16.0, 1.0]))) <= 1e-12
    assert abs(r.guaranteed.lower - 0.25) <= 1e-12 and abs(r.guaranteed.upper - 16.0) <= 1e-12
    maps = [np.array([[3.0]]), np.array([[1.0]])]
    r = member_map_transform(f0(), np.diag([1.0, 2.0]), maps, I2, (1.0, 4.0))
    assert np.max(np.abs(r.output.frame_operator.array - np.diag([36.0, 4.0]))) <= 1e-12
    assert abs(r.guaranteed.lower - 1.0) <= 1e-12 and abs(r.guaranteed.upper - 144.0) <= 1e-12


def test_canonical_dual_operator_and_bounds():
    for _, fam, _ in cases("canonical_dual", 100, (Profile.WELL_CONDITIONED, Profile.NEAR_SINGULAR)):
        pair = canonical_dual(fam)
        assert verify_dual_operator(pair, 1e-8).holds
        A, B, _ = optimal_bounds(fam)
        dA, dB, _ = optimal_bounds(pair.dual)
        assert abs(dA - 1 / B) <= 1e-8 / B
        assert abs(dB - 1 / A) <= 1e-8 / A


def test_transported_dual_reconstruction():
    for rng, fam, n in cases("transported_dual", 50):
        T = random_invertible(rng, n)
        maps = [random_invertible(rng, c) for c in fam.codomain_dims]
        pair = transported_dual(fam, T, maps)
        for _ in range(50):
            assert max(reconstruct(pair, complex_gaussian(rng, n)).residuals) <= 1e-8
    pair = transported_dual(f0(), np.diag([1.0, 2.0]), [np.array([[3.0]]), np.array([[1.0]])])
    assert np.max(np.abs(pair.dual.members[0].restricted - [[0.25, 0.0]])) <= 1e-12


def test_mixed_synthesis_bound():
    checked = 0
    for rng, lhs, _ in cases("mixed_synthesis", 100):
        rhs = perturbed_family(rng, lhs, 10.0 ** rng.uniform(-3, -0.5))
        for _ in range(100):
            g = DirectSumVector(tuple(complex_gaussian(rng, c) for c in lhs.codomain_dims))
            assert mixed_synthesis_check(lhs, rhs, g).holds
            checked += 1
    assert checked == 10_000
    chk = mixed_synthesis_check(f0(), f0_scaled(), DirectSumVector((np.ones(1), np.zeros(1))))
    assert abs(chk.norm - 0.2) <= 1e-12 and abs(chk.bound - 0.2) <= 1e-12


def test_dual_perturbation_bounds():
    for rng, lhs, _ in cases("dual_perturbation", 100):
        rhs = perturbed_family(rng, lhs, 10.0 ** rng.uniform(-3, -1.5))
        r = dual_stability_report(lhs, rhs, tol=1e-8)
        assert r.dual_gap <= r.bound_422_I + 1e-8
        assert r.inverse_distance <= r.bound_422_II + 1e-8
        assert r.dual_operator_distance <= r.bound_422_II + 1e-8
        assert r.d_used[1] == r.frame_op_distance
    r = dual_stability_report(f0(), f0_scaled())
    assert f"{r.inverse_distance:.4g}" == "0.1736" and f"{r.bound_422_II:.4g}" == "0.6942"
    assert r.inverse_distance <= r.bound_422_II


def _quotient_instance(i):
    rng = np.random.default_rng([9, i])
    n = DIMS[(i // 4) % len(DIMS)]
    kind = ("full_rank", "rank_deficient", "bessel_only", "bessel_only_range")[i % 4]
    profile = Profile.FORCED_BESSEL_ONLY if kind.startswith("bessel") else Profile.WELL_CONDITIONED
    fam = random_family(int(rng.integers(2**63)), n, int(rng.integers(3, 17)), spectrum_profile=profile)
    U = random_invertible(rng, n)
    if kind == "rank_deficient":
        r = int(rng.integers(0, n))
        K = complex_gaussian(rng, n, r) @ complex_gaussian(rng, r, n)
    elif kind == "bessel_only_range":
        vals, vecs = fam.frame_operator.matrix.eig
        R = vecs[:, vals > 1e-8 * vals[-1]]
        K = R @ complex_gaussian(rng, R.shape[1], n)
    else:
        K = random_invertible(rng, n)
    return kind, fam, K, U


def test_quotient_condition_agreement():
    seen = {True: 0, False: 0}
    for i in range(300):
        kind, fam, K, U = _quotient_instance(i)
        r = quotient_equivalence_report(fam, K, U)
        assert r.consistent, (i, kind, r)
        seen[bool(r.cond_I[0])] += 1
        if r.cond_II[0] and r.bridge_lower_bound is not None:
            moved = conjugated_family(fam, U)
            cert = BoundCertificate(
                CertificateKind.K_FRAME, optimal_bounds(moved).upper, r.bridge_lower_bound, U @ K
            )
            assert verify_certificate(moved, cert, 1e-8).verdict, (i, kind)
    assert seen[True] and seen[False]


def _without_elapsed(report):
    rows = [json.loads(line) for line in report.splitlines()]
    return json.dumps([{k: v for k, v in r.items() if k != "elapsed_ms"} for r in rows])


def test_tooling_contracts(tmp_path):
    for _, fam, _ in cases("round_trip", 20, tuple(Profile)):
        back = parse_spec(dump_spec(fam)).family
        assert np.array_equal(back.frame_operator.array, fam.frame_operator.array)

    cfg = CertificationRun("all", 12345, (3, 8), 4)
    first = _without_elapsed(emit_report(run_certification(cfg), "machine"))
    assert first == _without_elapsed(emit_report(run_certification(cfg), "machine"))

    spec = tmp_path / "f0.json"
    spec.write_text(f0_document())
    assert main(["verify", str(spec), "--A", "1", "--B", "4"]) == 0
    assert main(["verify", str(spec), "--A", "2", "--B", "4"]) == 1
    assert main(["certify", "--suite", "duals", "--trials", "2", "--dims", "3"]) == 0
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["bounds", str(bad)]) == 2
