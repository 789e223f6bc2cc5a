"""Seeded random g-fusion families with controlled spectra."""

from __future__ import annotations

import enum

import numpy as np

from gfusion.errors import InfeasibleProfile
from gfusion.frames import FrameMember, GFusionFamily
from gfusion.transforms import conjugated_family

__all__ = [
    "Profile",
    "random_family",
    "complex_gaussian",
    "random_unitary",
    "random_invertible",
    "random_subspace",
    "perturbed_family",
]


class Profile(str, enum.Enum):
    WELL_CONDITIONED = "well_conditioned"
    NEAR_SINGULAR = "near_singular"
    FORCED_BESSEL_ONLY = "forced_bessel_only"


def complex_gaussian(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_unitary(rng, n):
    Q, R = np.linalg.qr(complex_gaussian(rng, n, n))
    phases = np.diag(R) / np.abs(np.diag(R))
    return Q * phases


def random_invertible(rng, n, cond=4.0):
    """``Q1 diag(s) Q2`` with singular values spread over ``[1, cond]``."""
    s = np.exp(rng.uniform(0.0, np.log(cond), n))
    s[rng.integers(n)] = 1.0
    return (random_unitary(rng, n) * s) @ random_unitary(rng, n)


def random_subspace(rng, n, d):
    return np.linalg.qr(complex_gaussian(rng, n, d))[0]


def _spread(rng, n, member_count, max_sub, max_cod):
    subs = rng.integers(1, max_sub + 1, member_count)
    cods = rng.integers(1, max_cod + 1, member_count)
    # make sure the members can jointly reach every direction
    order = rng.permutation(member_count)
    k = 0
    while np.minimum(subs, cods).sum() < n:
        j = order[k % member_count]
        subs[j], cods[j] = max_sub, max_cod
        k += 1
    return subs, cods


def _whiten(rng, family, spectrum):
    """Conjugate so the frame operator becomes ``Q diag(spectrum) Q*``."""
    values, vectors = family.frame_operator.matrix.eig
    inv_sqrt = (vectors / np.sqrt(values)) @ vectors.conj().T
    Q = random_unitary(rng, family.ambient_dim)
    U = (Q * np.sqrt(spectrum)) @ Q.conj().T @ inv_sqrt
    return conjugated_family(family, U)


def random_family(
    seed,
    dim,
    member_count,
    max_subspace_dim=None,
    max_codomain_dim=None,
    spectrum_profile=Profile.WELL_CONDITIONED,
) -> GFusionFamily:
    """Deterministic random family.

    ``well_conditioned`` guarantees ``A_opt >= 0.01 B_opt``; ``near_singular``
    yields a frame with ``A_opt / B_opt`` between about ``1e-6`` and ``1e-4``;
    ``forced_bessel_only`` plants a unit vector annihilated by every
    ``Lambda_j P_{W_j}``, so ``A_opt = 0``.
    """
    profile = Profile(spectrum_profile)
    if dim < 1 or member_count < 1:
        raise ValueError("dim and member_count must be positive")
    max_sub = min(dim, max_subspace_dim or dim)
    max_cod = max_codomain_dim or max(1, dim // 2)
    rng = np.random.default_rng(seed)

    if profile is Profile.FORCED_BESSEL_ONLY:
        if dim < 2:
            raise InfeasibleProfile("a common null vector needs dim >= 2")
        z = complex_gaussian(rng, dim)
        z /= np.linalg.norm(z)
        members = []
        for _ in range(member_count):
            # a 1-dim W_j would be spanned by the planted direction, zeroing the member
            d = int(rng.integers(min(2, max_sub), max_sub + 1))
            m = int(rng.integers(1, max_cod + 1))
            W = random_subspace(rng, dim, d)
            u = W @ (W.conj().T @ z)
            op = complex_gaussian(rng, m, dim)
            if np.linalg.norm(u) > 0:
                u /= np.linalg.norm(u)
                op = op - np.outer(op @ u, u.conj())
            members.append(FrameMember(W, op, rng.uniform(0.5, 2.0)))
        return GFusionFamily(tuple(members), dim)

    if member_count * min(max_sub, max_cod) < dim:
        raise InfeasibleProfile(
            f"{member_count} members of rank <= {min(max_sub, max_cod)} cannot span dimension {dim}"
        )
    subs, cods = _spread(rng, dim, member_count, max_sub, max_cod)
    members = [
        FrameMember(
            random_subspace(rng, dim, int(d)),
            complex_gaussian(rng, int(m), dim),
            rng.uniform(0.5, 2.0),
        )
        for d, m in zip(subs, cods)
    ]
    family = GFusionFamily(tuple(members), dim)
    values = family.frame_operator.matrix.eigenvalues
    if profile is Profile.WELL_CONDITIONED:
        if values[0] >= 0.05 * values[-1]:
            return family
        spectrum = rng.uniform(0.1, 1.0, dim)
        spectrum[0] = 1.0
        return _whiten(rng, family, spectrum)
    spectrum = rng.uniform(0.5, 1.0, dim)
    spectrum[0] = 1.0
    spectrum[-1] = 10.0 ** rng.uniform(-6.0, -4.5)
    return _whiten(rng, family, spectrum)


def perturbed_family(rng, family: GFusionFamily, eps) -> GFusionFamily:
    """Same weights and codomains; operators and subspaces nudged by about ``eps``."""
    n = family.ambient_dim
    members = []
    for m in family.members:
        scale = np.linalg.norm(m.operator, 2)
        op = m.operator + eps * scale * complex_gaussian(rng, m.codomain_dim, n)
        basis = m.subspace_basis
        if basis.shape[1]:
            basis = np.linalg.qr(basis + eps * complex_gaussian(rng, n, basis.shape[1]))[0]
        members.append(FrameMember(basis, op, m.weight))
    return GFusionFamily(tuple(members), n)
