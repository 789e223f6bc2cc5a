"""Constructions that turn a (K-)g-fusion family into a new one.

Every builder returns a :class:`TransformResult` holding the new family and
the operator it is a K-frame for.  It also carries the bounds the construction
guarantees, already checked against the new frame operator.  The guarantees
are valid but usually loose; they are functions of whatever input bounds the
caller asserts, so pass optimal bounds for the sharpest constants.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from gfusion._tolerance import tol_rel
from gfusion.errors import (
    CertificateRejected,
    CommutationViolation,
    DimensionMismatch,
    InconsistentPair,
    NotAFrame,
)
from gfusion.frames import (
    BoundCertificate,
    CertificateKind,
    FrameClass,
    FrameMember,
    GFusionFamily,
    optimal_bounds,
    optimal_k_lower_bound,
    verify_certificate,
)
from gfusion.linalg import as_matrix, inverse, operator_norm, orthonormal_basis, projector

__all__ = [
    "Provenance",
    "TransformResult",
    "conjugated_family",
    "conjugate_transform",
    "pull_back_transform",
    "k_dual_transform",
    "projected_dual_transform",
    "member_map_transform",
    "member_map_frame_operator",
    "require_frame",
    "edge_bounds",
]


class Provenance(str, enum.Enum):
    # tags follow the CLI's --theorem choices
    CONJUGATE = "thm_3_1"
    PULL_BACK = "thm_3_2"
    K_DUAL = "thm_3_3"
    PROJECTED_DUAL = "cor_3_4"
    MEMBER_MAPS = "thm_3_5"


@dataclass(frozen=True, eq=False)
class TransformResult:
    output: GFusionFamily
    relative_to: np.ndarray
    guaranteed: BoundCertificate
    provenance: Provenance
    checks: dict = field(default_factory=dict)


def _square(M, n, name):
    M = as_matrix(M, name)
    if M.shape != (n, n):
        raise DimensionMismatch(f"{name} has shape {M.shape}, expected {(n, n)}")
    return M


def _span(M):
    return orthonormal_basis(M, allow_empty=True)


def require_frame(family: GFusionFamily):
    bounds = optimal_bounds(family)
    if bounds.frame_class is FrameClass.NOT_FRAME:
        raise NotAFrame(f"lower frame bound {bounds.lower:.3e} is not positive")
    return bounds


def _accept_bounds(family, K, bounds, tol):
    A, B = (float(b) for b in bounds)
    cert = verify_certificate(
        family, BoundCertificate(CertificateKind.K_FRAME, B, A, K), tol
    )
    if not cert.verdict:
        raise CertificateRejected(
            f"bounds (A={A:g}, B={B:g}) fail: margins {cert.margins}"
        )
    return A, B


def _guarantee(output, relative_to, lower, upper, tol):
    cert = BoundCertificate(CertificateKind.K_FRAME, upper, lower, relative_to)
    return verify_certificate(output, cert, tol)


def conjugated_family(family: GFusionFamily, U) -> GFusionFamily:
    """Members ``(U W_j, Lambda_j P_{W_j} U*, v_j)``."""
    U = _square(U, family.ambient_dim, "U")
    Uh = U.conj().T
    return GFusionFamily(
        tuple(
            FrameMember(_span(U @ m.subspace_basis), m.restricted @ Uh, m.weight)
            for m in family.members
        ),
        family.ambient_dim,
    )


def conjugate_transform(family, U, K, bounds, tol=None) -> TransformResult:
    """Move a K-frame through an invertible ``U``; the result is a ``U K U*``-frame.

    Guaranteed bounds are ``(A / ||U||^2, B ||U||^2)``.
    """
    tol = tol_rel() if tol is None else tol
    n = family.ambient_dim
    U = _square(U, n, "U")
    K = _square(K, n, "K")
    inverse(U)
    A, B = _accept_bounds(family, K, bounds, tol)
    out = conjugated_family(family, U)
    rel = U @ K @ U.conj().T
    u2 = operator_norm(U) ** 2
    return TransformResult(
        out, rel, _guarantee(out, rel, A / u2, B * u2, tol), Provenance.CONJUGATE
    )


def _same_members(a: GFusionFamily, b: GFusionFamily, tol):
    if len(a) != len(b) or a.ambient_dim != b.ambient_dim:
        return np.inf
    worst = 0.0
    for x, y in zip(a.members, b.members):
        if x.codomain_dim != y.codomain_dim or abs(x.weight - y.weight) > tol * x.weight:
            return np.inf
        scale = 1.0 + operator_norm(x.restricted)
        worst = max(
            worst,
            operator_norm(x.restricted - y.restricted) / scale,
            operator_norm(x.projector - y.projector),
        )
    return worst


def pull_back_transform(transformed, original, U, K, bounds, tol=None) -> TransformResult:
    """Undo :func:`conjugated_family`: ``original`` is a ``U^-1 K U``-frame.

    ``transformed`` must be the conjugate of ``original`` by ``U`` and a
    K-frame with the given bounds.  Guaranteed bounds are
    ``(A / ||U||^2, B ||U^-1||^2)``.
    """
    tol = tol_rel() if tol is None else tol
    n = original.ambient_dim
    U = _square(U, n, "U")
    K = _square(K, n, "K")
    U_inv = inverse(U)
    A, B = _accept_bounds(transformed, K, bounds, tol)
    mismatch = _same_members(transformed, conjugated_family(original, U), tol)
    if mismatch > 1e3 * tol:
        raise InconsistentPair(f"transformed family differs from U-conjugate by {mismatch:.3e}")
    rel = U_inv @ K @ U
    lower = A / operator_norm(U) ** 2
    upper = B * operator_norm(U_inv) ** 2
    return TransformResult(
        original,
        rel,
        _guarantee(original, rel, lower, upper, tol),
        Provenance.PULL_BACK,
        {"pair_mismatch": mismatch},
    )


def _k_dual_family(family, K, S_inv):
    T = K @ S_inv
    Th = T.conj().T
    return GFusionFamily(
        tuple(
            FrameMember(_span(T @ m.subspace_basis), m.restricted @ Th, m.weight)
            for m in family.members
        ),
        family.ambient_dim,
    )


def k_dual_transform(family, K, tol=None) -> TransformResult:
    """Members ``(K S^-1 W_j, Lambda_j P_{W_j} S^-1 K*, v_j)`` for invertible ``K``.

    The result is a K-frame with frame operator ``K S^-1 K*`` and guaranteed
    bounds ``(A / B^2, B ||K||^2 / A^2)``.  ``K = I`` gives the canonical dual.
    """
    tol = tol_rel() if tol is None else tol
    K = _square(K, family.ambient_dim, "K")
    inverse(K)
    A, B, _ = require_frame(family)
    S_inv = family.frame_operator.inverse()
    out = _k_dual_family(family, K, S_inv)
    expected = K @ S_inv @ K.conj().T
    residual = operator_norm(out.frame_operator.array - expected) / operator_norm(expected)
    k2 = operator_norm(K) ** 2
    return TransformResult(
        out,
        K,
        _guarantee(out, K, A / B**2, B * k2 / A**2, tol),
        Provenance.K_DUAL,
        {"operator_identity": residual},
    )


def projected_dual_transform(family, V_basis, tol=None) -> TransformResult:
    """The K-dual construction with ``K = P_V``; the output is a ``P_V``-frame.

    Subspaces ``P_V S^-1 W_j`` may collapse to zero; such members keep an
    empty basis and contribute nothing.  The certificate carries the constants
    ``(A / B^2, B / A^2)``, and ``checks['optimal_lower']`` records the optimal
    ``P_V``-relative lower bound (``None`` would mean no positive bound).
    """
    tol = tol_rel() if tol is None else tol
    n = family.ambient_dim
    V = as_matrix(V_basis, "V_basis")
    if V.shape[0] != n:
        raise DimensionMismatch(f"V_basis has {V.shape[0]} rows, expected {n}")
    P = projector(V).matrix
    A, B, _ = require_frame(family)
    S_inv = family.frame_operator.inverse()
    out = _k_dual_family(family, P, S_inv)
    expected = P @ S_inv @ P
    denom = max(operator_norm(expected), 1e-300)
    residual = operator_norm(out.frame_operator.array - expected) / denom
    p2 = operator_norm(P) ** 2
    return TransformResult(
        out,
        P,
        _guarantee(out, P, A / B**2, B * p2 / A**2, tol),
        Provenance.PROJECTED_DUAL,
        {"operator_identity": residual, "optimal_lower": optimal_k_lower_bound(out, P)},
    )


def edge_bounds(member_maps: Sequence) -> tuple:
    """``(m, M)``: smallest and largest singular value over all member maps."""
    sv = [np.linalg.svd(as_matrix(Tj), compute_uv=False) for Tj in member_maps]
    return float(min(s[-1] for s in sv)), float(max(s[0] for s in sv))


def _member_maps(family, member_maps):
    maps = [as_matrix(Tj, f"member_maps[{j}]") for j, Tj in enumerate(member_maps)]
    if len(maps) != len(family):
        raise DimensionMismatch(f"{len(maps)} member maps for {len(family)} members")
    for j, (Tj, m) in enumerate(zip(maps, family.members)):
        if Tj.shape != (m.codomain_dim, m.codomain_dim):
            raise DimensionMismatch(
                f"member_maps[{j}] has shape {Tj.shape}, expected "
                f"{(m.codomain_dim, m.codomain_dim)}"
            )
        inverse(Tj)
    return maps


def member_map_frame_operator(family, T, member_maps) -> np.ndarray:
    """``sum v_j^2 T P_j Lambda_j* T_j* T_j Lambda_j P_j T*`` without re-orthonormalizing ``T W_j``."""
    T = _square(T, family.ambient_dim, "T")
    n = family.ambient_dim
    S = np.zeros((n, n), dtype=np.complex128)
    for m, Tj in zip(family.members, member_maps):
        X = as_matrix(Tj) @ m.restricted @ T.conj().T
        S += m.weight**2 * (X.conj().T @ X)
    return S


def member_map_transform(family, T, member_maps, K, bounds, tol=None) -> TransformResult:
    """Members ``(T W_j, T_j Lambda_j P_{W_j} T*, v_j)``, still a K-frame when ``KT = TK``.

    Guaranteed bounds are ``(m^2 A / ||T^-1||^2, M^2 B ||T||^2)`` with ``m, M``
    from :func:`edge_bounds`.
    """
    tol = tol_rel() if tol is None else tol
    n = family.ambient_dim
    T = _square(T, n, "T")
    K = _square(K, n, "K")
    T_inv = inverse(T)
    maps = _member_maps(family, member_maps)
    comm = operator_norm(K @ T - T @ K)
    if comm > tol * (1.0 + operator_norm(K) * operator_norm(T)):
        raise CommutationViolation(f"||KT - TK|| = {comm:.3e}")
    A, B = _accept_bounds(family, K, bounds, tol)
    Th = T.conj().T
    out = GFusionFamily(
        tuple(
            FrameMember(_span(T @ m.subspace_basis), Tj @ m.restricted @ Th, m.weight)
            for m, Tj in zip(family.members, maps)
        ),
        n,
    )
    lo, hi = edge_bounds(maps)
    lower = lo**2 * A / operator_norm(T_inv) ** 2
    upper = hi**2 * B * operator_norm(T) ** 2
    direct = member_map_frame_operator(family, T, maps)
    residual = operator_norm(out.frame_operator.array - direct) / max(operator_norm(direct), 1e-300)
    return TransformResult(
        out,
        K,
        _guarantee(out, K, lower, upper, tol),
        Provenance.MEMBER_MAPS,
        {"assembly_identity": residual, "m": lo, "M": hi},
    )
