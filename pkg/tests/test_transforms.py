import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from gfusion import (
    Provenance,
    canonical_dual,
    conjugate_transform,
    conjugated_family,
    k_dual_transform,
    member_map_transform,
    optimal_bounds,
    optimal_k_lower_bound,
    projected_dual_transform,
    pull_back_transform,
)
from gfusion.errors import CertificateRejected, CommutationViolation, InconsistentPair, NotInvertible
from gfusion.tooling.generate import random_family, random_invertible, random_subspace
from gfusion.transforms import edge_bounds

from families import f0

I2 = np.eye(2)
U_F0 = np.diag([2.0, 1.0])


def test_conjugate_identity_is_noop():
    r = conjugate_transform(f0(), I2, I2, (1.0, 4.0))
    assert np.allclose(r.output.frame_operator.array, f0().frame_operator.array)
    assert np.allclose(r.relative_to, I2)
    assert (r.guaranteed.lower, r.guaranteed.upper) == (1.0, 4.0)


def test_conjugate_f0():
    r = conjugate_transform(f0(), U_F0, I2, (1.0, 4.0))
    assert np.max(np.abs(r.output.frame_operator.array - np.diag([16.0, 1.0]))) <= 1e-12
    assert np.allclose(r.relative_to, np.diag([4.0, 1.0]))
    assert (r.guaranteed.lower, r.guaranteed.upper) == (0.25, 16.0)
    assert r.guaranteed.verdict and r.provenance is Provenance.CONJUGATE
    assert optimal_k_lower_bound(r.output, r.relative_to) == pytest.approx(1.0)


def test_conjugate_rejects_bad_input_bounds():
    with pytest.raises(CertificateRejected):
        conjugate_transform(f0(), U_F0, I2, (2.0, 4.0))
    with pytest.raises(NotInvertible):
        conjugate_transform(f0(), np.diag([1.0, 0.0]), I2, (1.0, 4.0))


def test_pull_back_round_trip():
    fam = f0()
    moved = conjugate_transform(fam, U_F0, I2, (1.0, 4.0)).output
    r = pull_back_transform(moved, fam, U_F0, I2, (1.0, 16.0))
    assert r.output is fam
    assert (r.guaranteed.lower, r.guaranteed.upper) == (0.25, 16.0)
    assert r.guaranteed.verdict


def test_pull_back_f0_relative_operator():
    fam = f0()
    moved = conjugated_family(fam, U_F0)
    K = np.diag([4.0, 1.0])
    A = optimal_k_lower_bound(moved, K)
    r = pull_back_transform(moved, fam, U_F0, K, (A, 16.0))
    assert np.allclose(r.relative_to, K)
    assert r.guaranteed.verdict


def test_pull_back_detects_wrong_pair():
    moved = conjugated_family(f0(), U_F0)
    with pytest.raises(InconsistentPair):
        pull_back_transform(moved, f0(), np.diag([3.0, 1.0]), I2, (1.0, 16.0))


def test_k_dual_identity_is_canonical_dual():
    r = k_dual_transform(f0(), I2)
    canon = canonical_dual(f0()).dual
    for a, b in zip(r.output, canon):
        assert np.allclose(a.restricted, b.restricted)


def test_k_dual_f0():
    r = k_dual_transform(f0(), np.diag([2.0, 1.0]))
    assert np.allclose(r.output.frame_operator.array, I2, atol=1e-15)
    assert r.checks["operator_identity"] <= 1e-15
    assert r.guaranteed.verdict


def test_projected_dual_full_space_is_canonical():
    r = projected_dual_transform(f0(), I2)
    assert np.allclose(r.output.frame_operator.array, np.diag([0.25, 1.0]))


def test_projected_dual_f0():
    r = projected_dual_transform(f0(), np.array([[1.0], [0.0]]))
    assert np.allclose(r.output.frame_operator.array, np.diag([0.25, 0.0]), atol=1e-15)
    assert r.checks["optimal_lower"] == pytest.approx(0.25)
    assert r.output.members[1].subspace_dim == 0
    assert r.guaranteed.verdict


def test_member_maps_identity_is_noop():
    r = member_map_transform(f0(), I2, [np.eye(1), np.eye(1)], I2, (1.0, 4.0))
    assert np.allclose(r.output.frame_operator.array, np.diag([4.0, 1.0]))


def test_member_maps_f0():
    maps = [np.array([[3.0]]), np.array([[1.0]])]
    r = member_map_transform(f0(), np.diag([1.0, 2.0]), maps, I2, (1.0, 4.0))
    assert edge_bounds(maps) == (1.0, 3.0)
    assert np.max(np.abs(r.output.frame_operator.array - np.diag([36.0, 4.0]))) <= 1e-12
    assert (r.guaranteed.lower, r.guaranteed.upper) == pytest.approx((1.0, 144.0), abs=1e-12)
    assert r.guaranteed.verdict
    assert optimal_bounds(r.output)[:2] == pytest.approx((4.0, 36.0))


def test_member_maps_require_commuting_k():
    with pytest.raises(CommutationViolation):
        member_map_transform(
            f0(), np.array([[1.0, 1.0], [0.0, 1.0]]), [np.eye(1)] * 2, np.diag([1.0, 2.0]), (1.0, 4.0)
        )


@seed(41)
@settings(max_examples=20, deadline=None)
@given(n=st.integers(1, 8), s=st.integers(0, 2**31))
def test_conjugate_and_pull_back_certify(n, s):
    rng = np.random.default_rng(s)
    fam = random_family(s, n, 5)
    U, K = random_invertible(rng, n), random_invertible(rng, n)
    bounds = (optimal_k_lower_bound(fam, K), optimal_bounds(fam).upper)
    r = conjugate_transform(fam, U, K, bounds, 1e-8)
    assert r.guaranteed.verdict and min(r.guaranteed.margins) >= -1e-8
    moved_bounds = (optimal_k_lower_bound(r.output, K), optimal_bounds(r.output).upper)
    back = pull_back_transform(r.output, fam, U, K, moved_bounds, 1e-8)
    assert back.guaranteed.verdict


@seed(42)
@settings(max_examples=20, deadline=None)
@given(n=st.integers(2, 8), s=st.integers(0, 2**31))
def test_duals_transforms_certify(n, s):
    rng = np.random.default_rng(s)
    fam = random_family(s, n, 5)
    r = k_dual_transform(fam, random_invertible(rng, n), 1e-8)
    assert r.guaranteed.verdict and r.checks["operator_identity"] <= 1e-8
    p = projected_dual_transform(fam, random_subspace(rng, n, 1), 1e-8)
    assert p.guaranteed.verdict and p.checks["optimal_lower"] is not None


@seed(43)
@settings(max_examples=20, deadline=None)
@given(n=st.integers(1, 8), s=st.integers(0, 2**31))
def test_member_maps_certify(n, s):
    rng = np.random.default_rng(s)
    fam = random_family(s, n, 5)
    T = random_invertible(rng, n)
    maps = [random_invertible(rng, c) for c in fam.codomain_dims]
    r = member_map_transform(fam, T, maps, np.eye(n), optimal_bounds(fam)[:2], 1e-8)
    assert r.guaranteed.verdict and r.checks["assembly_identity"] <= 1e-8
