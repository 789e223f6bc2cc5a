"""Perturbation of g-fusion frames and of their canonical duals.

The gap between two shape-compatible families is the smallest ``D`` with
``sum v_j^2 ||(Lambda_j P_{W_j} - Gamma_j P_{V_j}) f||^2 <= D ||f||^2``, i.e.
the squared spectral norm of the stacked difference of analysis operators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from gfusion._tolerance import TOL_RECON
from gfusion.duals import canonical_dual
from gfusion.errors import ShapeMismatch
from gfusion.frames import DirectSumVector, GFusionFamily
from gfusion.linalg import operator_norm
from gfusion.transforms import require_frame

__all__ = [
    "PerturbationReport",
    "check_compatible",
    "perturbation_gap",
    "mixed_synthesis_check",
    "operator_distances",
    "dual_stability_report",
]


def check_compatible(lhs: GFusionFamily, rhs: GFusionFamily):
    if lhs.ambient_dim != rhs.ambient_dim:
        raise ShapeMismatch(f"ambient dims {lhs.ambient_dim} and {rhs.ambient_dim}")
    if len(lhs) != len(rhs):
        raise ShapeMismatch(f"member counts {len(lhs)} and {len(rhs)}")
    if lhs.codomain_dims != rhs.codomain_dims:
        raise ShapeMismatch("member codomain dimensions differ")
    if not np.allclose(lhs.weights, rhs.weights, rtol=1e-12, atol=0):
        raise ShapeMismatch("families must share the same weights")


def _stacked_difference(lhs, rhs):
    return np.vstack(
        [a.weight * (a.restricted - b.restricted) for a, b in zip(lhs.members, rhs.members)]
    )


def perturbation_gap(lhs: GFusionFamily, rhs: GFusionFamily) -> float:
    check_compatible(lhs, rhs)
    return operator_norm(_stacked_difference(lhs, rhs)) ** 2


class MixedSynthesis(NamedTuple):
    norm: float
    bound: float
    holds: bool


def mixed_synthesis_check(lhs, rhs, g: DirectSumVector, tol=1e-12) -> MixedSynthesis:
    """``||sum v_j (P_{W_j} Lambda_j* - P_{V_j} Gamma_j*) g_j|| <= sqrt(D) ||g||``."""
    check_compatible(lhs, rhs)
    if not isinstance(g, DirectSumVector):
        g = DirectSumVector(tuple(g))
    if not g.conforms_to(lhs):
        raise ShapeMismatch("direct-sum vector does not match the families")
    out = np.zeros(lhs.ambient_dim, dtype=np.complex128)
    for a, b, block in zip(lhs.members, rhs.members, g.blocks):
        out += a.weight * ((a.restricted - b.restricted).conj().T @ block)
    norm = float(np.linalg.norm(out))
    bound = float(np.sqrt(perturbation_gap(lhs, rhs)) * g.norm())
    return MixedSynthesis(norm, bound, bool(norm <= bound + tol * (1.0 + bound)))


class OperatorDistances(NamedTuple):
    d_S: float
    d_Sinv: float
    bound_S: float
    bound_Sinv: float


def operator_distances(lhs, rhs) -> OperatorDistances:
    """Distances between frame operators and their inverses, with their guaranteed bounds."""
    check_compatible(lhs, rhs)
    A1, B1, _ = require_frame(lhs)
    A2, B2, _ = require_frame(rhs)
    D = perturbation_gap(lhs, rhs)
    d_S = operator_norm(lhs.frame_operator.array - rhs.frame_operator.array)
    d_Sinv = operator_norm(lhs.frame_operator.inverse() - rhs.frame_operator.inverse())
    bound_S = np.sqrt(D) * (np.sqrt(B1) + np.sqrt(B2))
    return OperatorDistances(d_S, d_Sinv, float(bound_S), float(bound_S / (A1 * A2)))


@dataclass(frozen=True)
class PerturbationReport:
    """Stability numbers for two frames and their canonical duals.

    ``bound_421`` bounds ``||S_lhs - S_rhs||``; ``bound_422_I`` bounds the gap
    between the duals (``dual_gap``); ``bound_422_II`` bounds
    ``inverse_distance``, the sup of the difference of the duals' quadratic
    forms, which for self-adjoint operators is also the operator-norm distance
    of the dual frame operators.
    """

    d_opt: float
    frame_op_distance: float
    inverse_distance: float
    dual_gap: float
    bound_421: float
    bound_422_I: float
    bound_422_II: float
    d_used: tuple
    dual_operator_distance: float
    verdicts: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.verdicts.values())


def dual_stability_report(lhs, rhs, D=None, D_II=None, tol=TOL_RECON) -> PerturbationReport:
    """Compare two frames' canonical duals against the perturbation constants.

    ``D`` defaults to :func:`perturbation_gap` and ``D_II`` to
    ``||S_lhs - S_rhs||``, the smallest constants valid for each hypothesis.
    """
    check_compatible(lhs, rhs)
    A1, B1, _ = require_frame(lhs)
    A2, B2, _ = require_frame(rhs)
    d_opt = perturbation_gap(lhs, rhs)
    S1, S2 = lhs.frame_operator, rhs.frame_operator
    d_S = operator_norm(S1.array - S2.array)
    d_inv = operator_norm(S1.inverse() - S2.inverse())
    D = d_opt if D is None else float(D)
    D_II = d_S if D_II is None else float(D_II)

    dual_l = canonical_dual(lhs).dual
    dual_r = canonical_dual(rhs).dual
    dual_gap = perturbation_gap(dual_l, dual_r)
    dual_op = operator_norm(dual_l.frame_operator.array - dual_r.frame_operator.array)

    bound_421 = float(np.sqrt(D) * (np.sqrt(B1) + np.sqrt(B2)))
    bound_I = D * ((A1 + B1 + np.sqrt(B1 * B2)) / (A1 * A2)) ** 2
    bound_II = D_II / (A1 * A2)
    verdicts = {
        "frame_operator": d_S <= bound_421 + tol,
        "dual_gap": dual_gap <= bound_I + tol,
        "dual_quadratic_form": d_inv <= bound_II + tol,
        "dual_operator": dual_op <= bound_II + tol,
    }
    return PerturbationReport(
        d_opt=d_opt,
        frame_op_distance=d_S,
        inverse_distance=d_inv,
        dual_gap=dual_gap,
        bound_421=bound_421,
        bound_422_I=float(bound_I),
        bound_422_II=float(bound_II),
        d_used=(D, D_II),
        dual_operator_distance=dual_op,
        verdicts={k: bool(v) for k, v in verdicts.items()},
    )
