"""g-fusion families and their frame operators.

A family is a finite list of members ``(W_j, Lambda_j, v_j)``: a subspace of
``C^n`` given by an orthonormal basis, an operator ``C^n -> C^{m_j}`` and a
positive weight.  Each member acts through ``Lambda_j P_{W_j}``, whether or not
``Lambda_j`` already vanishes off ``W_j``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from gfusion._tolerance import EPS, TOL_PSD, tol_rel
from gfusion.errors import DimensionMismatch, InvalidFamily, NotOrthonormal
from gfusion.linalg import (
    HermitianMatrix,
    as_matrix,
    as_vector,
    check_orthonormal,
    operator_norm,
    psd_margin,
    psd_order,
)

__all__ = [
    "FrameMember",
    "GFusionFamily",
    "DirectSumVector",
    "FrameOperator",
    "FrameClass",
    "FrameBounds",
    "CertificateKind",
    "BoundCertificate",
    "assemble_frame_operator",
    "analysis_apply",
    "synthesis_apply",
    "synthesis_matrix",
    "quadratic_form",
    "optimal_bounds",
    "optimal_k_lower_bound",
    "verify_certificate",
]


def _frozen(a):
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FrameMember:
    """One member ``(W_j, Lambda_j, v_j)``.

    ``subspace_basis`` is ``n x d_j`` with orthonormal columns (``d_j = 0`` is
    allowed and denotes the zero subspace); ``operator`` is ``m_j x n``.
    """

    subspace_basis: np.ndarray
    operator: np.ndarray
    weight: float

    def __post_init__(self):
        basis = as_matrix(self.subspace_basis, "subspace_basis")
        op = as_matrix(self.operator, "operator")
        weight = float(self.weight)
        if not np.isfinite(weight) or weight <= 0:
            raise InvalidFamily(f"weight must be positive, got {self.weight!r}")
        if op.shape[1] != basis.shape[0]:
            raise InvalidFamily(
                f"operator has {op.shape[1]} columns but the subspace lives in "
                f"dimension {basis.shape[0]}"
            )
        try:
            check_orthonormal(basis)
        except NotOrthonormal as exc:
            raise InvalidFamily(f"subspace basis is not orthonormal ({exc})") from exc
        object.__setattr__(self, "subspace_basis", _frozen(basis))
        object.__setattr__(self, "operator", _frozen(op))
        object.__setattr__(self, "weight", weight)

    @property
    def ambient_dim(self) -> int:
        return self.subspace_basis.shape[0]

    @property
    def subspace_dim(self) -> int:
        return self.subspace_basis.shape[1]

    @property
    def codomain_dim(self) -> int:
        return self.operator.shape[0]

    @cached_property
    def projector(self) -> np.ndarray:
        Q = self.subspace_basis
        return Q @ Q.conj().T

    @cached_property
    def restricted(self) -> np.ndarray:
        """``Lambda_j P_{W_j}`` as an ``m_j x n`` matrix."""
        return self.operator @ self.projector


@dataclass(frozen=True, eq=False)
class GFusionFamily:
    members: tuple
    ambient_dim: int | None = None

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise InvalidFamily("a family needs at least one member")
        for j, m in enumerate(members):
            if not isinstance(m, FrameMember):
                raise InvalidFamily(f"members[{j}] is not a FrameMember")
        n = members[0].ambient_dim if self.ambient_dim is None else int(self.ambient_dim)
        if n < 1:
            raise InvalidFamily("ambient dimension must be positive")
        for j, m in enumerate(members):
            if m.ambient_dim != n:
                raise InvalidFamily(
                    f"members[{j}] lives in dimension {m.ambient_dim}, family in {n}"
                )
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "ambient_dim", n)

    @classmethod
    def from_arrays(cls, bases, operators, weights, ambient_dim=None):
        members = [FrameMember(b, o, w) for b, o, w in zip(bases, operators, weights, strict=True)]
        return cls(tuple(members), ambient_dim)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, j) -> FrameMember:
        return self.members[j]

    @property
    def weights(self) -> np.ndarray:
        return np.array([m.weight for m in self.members])

    @property
    def codomain_dims(self) -> tuple:
        return tuple(m.codomain_dim for m in self.members)

    def scaled(self, factor) -> "GFusionFamily":
        """Same subspaces and weights, every member operator multiplied by ``factor``."""
        return GFusionFamily(
            tuple(replace(m, operator=factor * m.operator) for m in self.members),
            self.ambient_dim,
        )

    @cached_property
    def frame_operator(self) -> "FrameOperator":
        return assemble_frame_operator(self)


@dataclass(frozen=True)
class DirectSumVector:
    """Element of the direct sum of the member codomains, one block per member."""

    blocks: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "blocks", tuple(as_vector(b, name="block") for b in self.blocks)
        )

    @classmethod
    def zeros(cls, family: GFusionFamily) -> "DirectSumVector":
        return cls(tuple(np.zeros(m) for m in family.codomain_dims))

    @classmethod
    def from_flat(cls, family: GFusionFamily, flat) -> "DirectSumVector":
        flat = as_vector(flat, sum(family.codomain_dims))
        cuts = np.cumsum(family.codomain_dims)[:-1]
        return cls(tuple(np.split(flat, cuts)))

    def flat(self) -> np.ndarray:
        return np.concatenate(self.blocks) if self.blocks else np.zeros(0, complex)

    def norm(self) -> float:
        return float(np.sqrt(sum(np.vdot(b, b).real for b in self.blocks)))

    def inner(self, other: "DirectSumVector") -> complex:
        """``<self, other>``, linear in the first argument."""
        return complex(sum(np.vdot(o, b) for b, o in zip(self.blocks, other.blocks, strict=True)))

    def conforms_to(self, family: GFusionFamily) -> bool:
        return tuple(b.shape[0] for b in self.blocks) == family.codomain_dims


@dataclass(frozen=True, eq=False)
class FrameOperator:
    matrix: HermitianMatrix
    source: GFusionFamily
    synthesis_residual: float = 0.0
    # eigenvalues at or below this are rounding noise from the assembly
    noise_floor: float = 0.0

    @property
    def array(self) -> np.ndarray:
        return self.matrix.matrix

    def inverse(self) -> np.ndarray:
        """Spectral inverse; on a numerically singular ``S`` this is the pseudoinverse."""
        return self.matrix.inverse(rank_tol=TOL_PSD)


class FrameClass(str, enum.Enum):
    NOT_FRAME = "not_frame"
    FRAME = "frame"
    TIGHT = "tight"
    PARSEVAL = "parseval"


class FrameBounds(NamedTuple):
    lower: float
    upper: float
    frame_class: FrameClass


class CertificateKind(str, enum.Enum):
    BESSEL = "bessel"
    FRAME = "frame"
    K_FRAME = "k_frame"


@dataclass(frozen=True, eq=False)
class BoundCertificate:
    """Claimed bounds for a family plus, once verified, a verdict and margins.

    Margins are ``lambda_min(S - A*I)`` (or ``S - A*KK*``) and
    ``lambda_min(B*I - S)``; both are nonnegative for exact bounds.
    """

    kind: CertificateKind
    upper: float
    lower: float | None = None
    k_operator: np.ndarray | None = None
    verdict: bool | None = None
    margins: tuple | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "kind", CertificateKind(self.kind))


def _check_f(family, f):
    return as_vector(f, family.ambient_dim, "f")


def synthesis_matrix(family: GFusionFamily) -> np.ndarray:
    """``[v_1 P_1 Lambda_1* | ... | v_J P_J Lambda_J*]`` of shape ``n x sum(m_j)``."""
    return np.hstack([m.weight * m.restricted.conj().T for m in family.members])


def assemble_frame_operator(family: GFusionFamily) -> FrameOperator:
    """Sum ``v_j^2 P_j Lambda_j* Lambda_j P_j`` and cross-check it against ``T T*``."""
    if not isinstance(family, GFusionFamily):
        raise InvalidFamily("expected a GFusionFamily")
    n = family.ambient_dim
    S = np.zeros((n, n), dtype=np.complex128)
    for m in family.members:
        R = m.restricted
        S += m.weight**2 * (R.conj().T @ R)
    T = synthesis_matrix(family)
    residual = operator_norm(S - T @ T.conj().T)
    scale = sum(m.weight**2 * np.linalg.norm(m.operator) ** 2 for m in family.members)
    return FrameOperator(HermitianMatrix(S), family, residual, n * EPS * scale)


def analysis_apply(family: GFusionFamily, f) -> DirectSumVector:
    f = _check_f(family, f)
    return DirectSumVector(tuple(m.weight * (m.restricted @ f) for m in family.members))


def synthesis_apply(family: GFusionFamily, g: DirectSumVector) -> np.ndarray:
    if not isinstance(g, DirectSumVector):
        g = DirectSumVector(tuple(g))
    if not g.conforms_to(family):
        raise DimensionMismatch("direct-sum vector does not match the family's codomains")
    out = np.zeros(family.ambient_dim, dtype=np.complex128)
    for m, block in zip(family.members, g.blocks):
        out += m.weight * (m.restricted.conj().T @ block)
    return out


def quadratic_form(family: GFusionFamily, f) -> float:
    """``sum_j v_j^2 ||Lambda_j P_j f||^2`` by direct summation (no frame operator)."""
    f = _check_f(family, f)
    total = 0.0
    for m in family.members:
        y = m.restricted @ f
        total += m.weight**2 * float(np.vdot(y, y).real)
    return total


def optimal_bounds(family: GFusionFamily, tol_psd=TOL_PSD, tol=None) -> FrameBounds:
    """Extreme eigenvalues of the frame operator and the resulting class."""
    tol = tol_rel() if tol is None else tol
    values = family.frame_operator.matrix.eigenvalues
    lower, upper = float(max(values[0], 0.0)), float(values[-1])
    if lower <= tol_psd * upper or upper <= family.frame_operator.noise_floor:
        cls = FrameClass.NOT_FRAME
    elif abs(upper - lower) <= tol * upper:
        cls = FrameClass.PARSEVAL if abs(upper - 1.0) <= tol else FrameClass.TIGHT
    else:
        cls = FrameClass.FRAME
    return FrameBounds(lower, upper, cls)


def optimal_k_lower_bound(family: GFusionFamily, K, tol_psd=TOL_PSD) -> float | None:
    """Largest ``A`` with ``A K K* <= S``, or ``None`` if no positive ``A`` exists.

    A positive bound exists exactly when ``range(K)`` lies in ``range(S)``.
    Returns ``inf`` for ``K = 0``.
    """
    K = as_matrix(K, "K")
    n = family.ambient_dim
    if K.shape != (n, n):
        raise DimensionMismatch(f"K has shape {K.shape}, expected {(n, n)}")
    k_norm = operator_norm(K)
    if k_norm == 0:
        return float("inf")
    values, vectors = family.frame_operator.matrix.eig
    cutoff = max(tol_psd * values[-1], family.frame_operator.noise_floor, 0.0)
    null = vectors[:, values <= cutoff]
    # (I - S S+) K through the eigenvectors of the numerical null space
    if null.shape[1] and operator_norm(null.conj().T @ K) > tol_psd * k_norm:
        return None
    rng = vectors[:, values > cutoff]
    if rng.shape[1] == 0:
        return None
    C = rng.conj().T @ K / np.sqrt(values[values > cutoff])[:, None]
    top = operator_norm(C) ** 2
    if top <= 0:
        return None
    return float(1.0 / top)


def verify_certificate(family: GFusionFamily, cert: BoundCertificate, tol=None) -> BoundCertificate:
    """Check claimed bounds against the frame operator in the Loewner order."""
    tol = tol_rel() if tol is None else tol
    S = family.frame_operator.array
    n = family.ambient_dim
    eye = np.eye(n)
    upper_ok = psd_order(S, cert.upper * eye, tol)
    upper_margin = psd_margin(S, cert.upper * eye)
    lower_ok, lower_margin = True, None
    if cert.kind is CertificateKind.FRAME:
        if cert.lower is None:
            raise ValueError("frame certificate needs a lower bound")
        lower_ok = cert.lower > 0 and cert.lower <= cert.upper and psd_order(cert.lower * eye, S, tol)
        lower_margin = psd_margin(cert.lower * eye, S)
    elif cert.kind is CertificateKind.K_FRAME:
        if cert.lower is None or cert.k_operator is None:
            raise ValueError("k_frame certificate needs a lower bound and K")
        K = as_matrix(cert.k_operator, "K")
        if K.shape != (n, n):
            raise DimensionMismatch(f"K has shape {K.shape}, expected {(n, n)}")
        KK = cert.lower * (K @ K.conj().T)
        lower_ok = cert.lower > 0 and psd_order(KK, S, tol)
        lower_margin = psd_margin(KK, S)
    return replace(cert, verdict=bool(upper_ok and lower_ok), margins=(lower_margin, upper_margin))
