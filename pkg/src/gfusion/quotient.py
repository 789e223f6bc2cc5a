"""Quotient operators ``[U / V]`` and the K-frame characterization built on them.

In finite dimensions a quotient ``V f -> U f`` is bounded as soon as it is
well defined, which happens exactly when ``null(V)`` sits inside ``null(U)``.
Undefined quotients are returned as values (``defined == False``), not raised.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from gfusion._tolerance import TOL_PSD
from gfusion.errors import DimensionMismatch
from gfusion.frames import GFusionFamily, optimal_k_lower_bound
from gfusion.linalg import HermitianMatrix, as_matrix, inverse, operator_norm, pseudo_inverse
from gfusion.transforms import conjugated_family

__all__ = [
    "QuotientOperator",
    "EquivalenceReport",
    "make_quotient",
    "quotient_equivalence_report",
    "QUOTIENT_RANK_TOL",
]

# relative singular-value cutoff for quotient denominators: square roots of
# PSD matrices clipped at TOL_PSD keep singular values >= 1e-5 * sigma_max
QUOTIENT_RANK_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class QuotientOperator:
    numerator: np.ndarray
    denominator: np.ndarray
    null_inclusion_residual: float
    defined: bool
    norm: float | None = None
    matrix: np.ndarray | None = None
    relation_residual: float | None = None


def make_quotient(numerator, denominator, tol=TOL_PSD, rank_tol=None) -> QuotientOperator:
    """Realize ``[numerator / denominator]`` as ``numerator @ pinv(denominator)``."""
    N = as_matrix(numerator, "numerator")
    Dn = as_matrix(denominator, "denominator")
    if N.shape[1] != Dn.shape[1]:
        raise DimensionMismatch(f"column counts {N.shape[1]} and {Dn.shape[1]} differ")
    D_pinv = pseudo_inverse(Dn, rank_tol)
    n_norm = operator_norm(N)
    leak = N - (N @ D_pinv) @ Dn
    residual = operator_norm(leak) / (1.0 + n_norm)
    if residual > tol:
        return QuotientOperator(N, Dn, residual, False)
    T = N @ D_pinv
    return QuotientOperator(
        N, Dn, residual, True, operator_norm(T), T, operator_norm(T @ Dn - N)
    )


def _clipped_sqrt(H, tol_psd):
    # eigenvalues at or below tol_psd * lambda_max are numerical zeros
    H = HermitianMatrix(H)
    top = max(H.norm, 0.0)

    def root(lam):
        out = np.zeros_like(lam)
        keep = lam > tol_psd * top
        out[keep] = np.sqrt(lam[keep])
        return out

    return H.spectral_function(root).matrix


class EquivalenceReport(NamedTuple):
    cond_I: tuple
    cond_II: tuple
    cond_III: tuple
    consistent: bool
    bridge_lower_bound: float | None


def quotient_equivalence_report(
    family: GFusionFamily, K, U, tol_psd=TOL_PSD, rank_tol=QUOTIENT_RANK_TOL
) -> EquivalenceReport:
    """Evaluate the three equivalent conditions for ``U``, ``K`` and a family.

    (I)   the ``U``-conjugated family is a ``UK``-frame;
    (II)  ``[(UK)* / S^(1/2) U*]`` is bounded;
    (III) ``[(UK)* / (U S U*)^(1/2)]`` is bounded.

    When (II) holds with norm ``t > 0``, ``1 / t^2`` is a valid (in fact the
    optimal) ``UK``-lower bound for the conjugated family.
    """
    n = family.ambient_dim
    K = as_matrix(K, "K")
    U = as_matrix(U, "U")
    if K.shape != (n, n) or U.shape != (n, n):
        raise DimensionMismatch(f"K {K.shape} and U {U.shape} must be {(n, n)}")
    inverse(U)
    UK = U @ K
    S = family.frame_operator.array

    conj = conjugated_family(family, U)
    A = optimal_k_lower_bound(conj, UK, tol_psd)
    cond_I = (A is not None and A > 0, A)

    q2 = make_quotient(UK.conj().T, _clipped_sqrt(S, tol_psd) @ U.conj().T, tol_psd, rank_tol)
    q3 = make_quotient(UK.conj().T, _clipped_sqrt(U @ S @ U.conj().T, tol_psd), tol_psd, rank_tol)
    cond_II = (q2.defined, q2.norm)
    cond_III = (q3.defined, q3.norm)
    consistent = cond_I[0] == cond_II[0] == cond_III[0]
    bridge = None
    if q2.defined and q2.norm and q2.norm > 0:
        bridge = 1.0 / q2.norm**2
    return EquivalenceReport(cond_I, cond_II, cond_III, bool(consistent), bridge)
