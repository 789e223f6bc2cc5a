import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from gfusion import DirectSumVector, dual_stability_report, mixed_synthesis_check, operator_distances, perturbation_gap
from gfusion.errors import ShapeMismatch
from gfusion.tooling.generate import complex_gaussian, perturbed_family, random_family

from families import f0, f0_scaled, identity_family
from oracles import sampled_rayleigh_range


def test_gap_of_identical_families_is_zero():
    assert perturbation_gap(f0(), f0()) == 0.0
    r = dual_stability_report(f0(), f0())
    assert r.ok and r.dual_gap == 0 and r.inverse_distance == 0


def test_scaled_f0_gap():
    assert perturbation_gap(f0(), f0_scaled()) == pytest.approx(0.04, rel=1e-12)


def test_scaled_f0_mixed_synthesis_is_tight():
    g = DirectSumVector((np.array([1.0]), np.array([0.0])))
    chk = mixed_synthesis_check(f0(), f0_scaled(), g)
    assert chk.holds
    assert chk.norm == pytest.approx(0.2, abs=1e-12)
    assert chk.bound == pytest.approx(0.2, abs=1e-12)


def test_scaled_f0_operator_distances():
    d = operator_distances(f0(), f0_scaled())
    assert d.d_S == pytest.approx(0.84, abs=1e-12)
    assert d.bound_S == pytest.approx(0.84, abs=1e-12)
    assert d.d_Sinv == pytest.approx(max(0.25 - 1 / 4.84, 1 - 1 / 1.21), rel=1e-12)


def test_scaled_f0_report():
    r = dual_stability_report(f0(), f0_scaled())
    assert r.bound_422_I == pytest.approx(0.04 * (9.4 / 1.21) ** 2, rel=1e-12)
    assert round(r.bound_422_I, 3) == 2.414
    assert r.inverse_distance == pytest.approx(0.17355, abs=5e-6)
    assert r.bound_422_II == pytest.approx(0.6942, abs=5e-5)
    assert r.dual_gap < r.bound_422_I
    assert r.ok


def test_incompatible_pairs_are_rejected():
    with pytest.raises(ShapeMismatch):
        perturbation_gap(f0(), identity_family(2))
    with pytest.raises(ShapeMismatch):
        perturbation_gap(f0(), identity_family(3))


@seed(51)
@settings(max_examples=10, deadline=None)
@given(n=st.integers(2, 6), s=st.integers(0, 2**31))
def test_gap_matches_sampling_oracle(n, s):
    rng = np.random.default_rng(s)
    lhs = random_family(s, n, 4)
    rhs = perturbed_family(rng, lhs, 0.05)
    D = perturbation_gap(lhs, rhs)
    # the gap is the top of sum v^2 |(L - G) f|^2 over unit f
    H = sum(
        a.weight**2 * (a.restricted - b.restricted).conj().T @ (a.restricted - b.restricted)
        for a, b in zip(lhs, rhs)
    )
    _, top = sampled_rayleigh_range(H, rng, 10_000)
    assert top <= D * (1 + 1e-12)
    assert top >= 0.95 * D if n <= 3 else top >= 0.5 * D


@seed(52)
@settings(max_examples=20, deadline=None)
@given(n=st.integers(1, 10), eps=st.floats(1e-4, 0.05), s=st.integers(0, 2**31))
def test_stability_bounds_hold(n, eps, s):
    rng = np.random.default_rng(s)
    lhs = random_family(s, n, 5)
    rhs = perturbed_family(rng, lhs, eps)
    r = dual_stability_report(lhs, rhs)
    assert r.ok, r.verdicts
    for _ in range(20):
        g = DirectSumVector(tuple(complex_gaussian(rng, c) for c in lhs.codomain_dims))
        assert mixed_synthesis_check(lhs, rhs, g).holds
