"""Dual g-fusion frames and reconstruction."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from gfusion._tolerance import TOL_RECON
from gfusion.errors import WrongCoupling
from gfusion.frames import FrameMember, GFusionFamily
from gfusion.linalg import as_vector, inverse, operator_norm, orthonormal_basis
from gfusion.transforms import (
    _member_maps,
    _square,
    edge_bounds,
    member_map_frame_operator,
    require_frame,
)

__all__ = [
    "Coupling",
    "DualPair",
    "canonical_dual",
    "verify_dual_operator",
    "transported_dual",
    "reconstruct",
    "reconstruction_operators",
]


class Coupling(str, enum.Enum):
    CANONICAL = "canonical"
    TRANSPORTED = "transported"


@dataclass(frozen=True, eq=False)
class DualPair:
    """A family and a dual partner, member by member.

    ``transport`` is the operator moving the subspaces (identity for the
    canonical dual).  ``checks`` maps a name to ``(value, bound, holds)``.
    """

    primal: GFusionFamily
    dual: GFusionFamily
    coupling: Coupling
    transport: np.ndarray
    mixing: np.ndarray | None = None
    checks: dict = field(default_factory=dict)


def canonical_dual(family: GFusionFamily) -> DualPair:
    """Members ``(S^-1 W_j, Lambda_j P_{W_j} S^-1, v_j)``; raises NotAFrame if ``S`` is singular."""
    require_frame(family)
    S_inv = family.frame_operator.inverse()
    dual = GFusionFamily(
        tuple(
            FrameMember(
                orthonormal_basis(S_inv @ m.subspace_basis, allow_empty=True),
                m.restricted @ S_inv,
                m.weight,
            )
            for m in family.members
        ),
        family.ambient_dim,
    )
    return DualPair(family, dual, Coupling.CANONICAL, np.eye(family.ambient_dim), S_inv)


class DualOperatorCheck(NamedTuple):
    holds: bool
    residual: float


def verify_dual_operator(pair: DualPair, tol=TOL_RECON) -> DualOperatorCheck:
    """Relative distance between the dual's frame operator and ``S^-1``."""
    if pair.coupling is not Coupling.CANONICAL:
        raise WrongCoupling(f"expected a canonical pair, got {pair.coupling.value}")
    S_inv = pair.primal.frame_operator.inverse()
    residual = operator_norm(pair.dual.frame_operator.array - S_inv) / operator_norm(S_inv)
    return DualOperatorCheck(bool(residual <= tol), residual)


def transported_dual(family: GFusionFamily, T, member_maps, dual_subspace="mixing") -> DualPair:
    """Dual built from an invertible ``T`` and invertible member maps ``T_j``.

    With ``S_G = sum v_j^2 T P_j Lambda_j* T_j* T_j Lambda_j P_j T*``,
    ``U = T* S_G^-1 T`` and ``L_j = T_j* T_j``, the dual operators are
    ``D_j = L_j Lambda_j P_{W_j} U``.

    The dual subspaces default to ``U W_j``.  Because ``U`` is self-adjoint,
    ``P_{W_j} U = P_{W_j} U P_{U W_j}``, which is what makes both
    reconstruction sums return ``f`` exactly.  ``dual_subspace="transport"``
    uses ``T W_j`` instead; that variant only reconstructs when ``P_{W_j} U``
    happens to vanish off ``T W_j`` (e.g. commuting diagonal data), and is kept
    for comparison.
    """
    if dual_subspace not in ("mixing", "transport"):
        raise ValueError(f"dual_subspace must be 'mixing' or 'transport', got {dual_subspace!r}")
    A, _, _ = require_frame(family)
    n = family.ambient_dim
    T = _square(T, n, "T")
    T_inv = inverse(T)
    maps = _member_maps(family, member_maps)
    S_G = member_map_frame_operator(family, T, maps)
    U = T.conj().T @ inverse(S_G) @ T
    U = 0.5 * (U + U.conj().T)
    members = []
    checks = {}
    lo, hi = edge_bounds(maps)
    for j, (m, Tj) in enumerate(zip(family.members, maps)):
        L = Tj.conj().T @ Tj
        carrier = U if dual_subspace == "mixing" else T
        members.append(
            FrameMember(
                orthonormal_basis(carrier @ m.subspace_basis, allow_empty=True),
                L @ m.restricted @ U,
                m.weight,
            )
        )
        l_norm = operator_norm(L)
        checks[f"L_norm[{j}]"] = (l_norm, hi**2, bool(l_norm <= hi**2 * (1 + 1e-12)))
    u_bound = operator_norm(T) ** 2 / (lo**2 * A / operator_norm(T_inv) ** 2)
    u_norm = operator_norm(U)
    checks["U_norm"] = (u_norm, u_bound, bool(u_norm <= u_bound * (1 + 1e-9)))
    dual = GFusionFamily(tuple(members), n)
    return DualPair(family, dual, Coupling.TRANSPORTED, T, U, checks)


def reconstruction_operators(pair: DualPair):
    """The two resolution-of-identity operators of a pair.

    ``left  = sum v_j^2 P_{W_j} Lambda_j* D_j P_{W'_j}``
    ``right = sum v_j^2 P_{W'_j} D_j* Lambda_j P_{W_j}``
    where ``(W'_j, D_j)`` are the dual members.
    """
    n = pair.primal.ambient_dim
    left = np.zeros((n, n), dtype=np.complex128)
    right = np.zeros((n, n), dtype=np.complex128)
    for p, d in zip(pair.primal.members, pair.dual.members):
        w2 = p.weight**2
        left += w2 * (p.restricted.conj().T @ d.restricted)
        right += w2 * (d.restricted.conj().T @ p.restricted)
    return left, right


class Reconstruction(NamedTuple):
    f_left: np.ndarray
    f_right: np.ndarray
    residuals: tuple


def reconstruct(pair: DualPair, f) -> Reconstruction:
    """Apply both reconstruction sums to ``f``; residuals are relative to ``||f||``."""
    f = as_vector(f, pair.primal.ambient_dim, "f")
    f_left = np.zeros_like(f)
    f_right = np.zeros_like(f)
    for p, d in zip(pair.primal.members, pair.dual.members):
        w2 = p.weight**2
        f_left += w2 * (p.restricted.conj().T @ (d.restricted @ f))
        f_right += w2 * (d.restricted.conj().T @ (p.restricted @ f))
    scale = np.linalg.norm(f)
    scale = scale if scale > 0 else 1.0
    res = (
        float(np.linalg.norm(f_left - f) / scale),
        float(np.linalg.norm(f_right - f) / scale),
    )
    return Reconstruction(f_left, f_right, res)
