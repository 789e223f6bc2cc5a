"""Dense complex linear algebra kernel.

Everything here works on ``complex128`` numpy arrays. Real input is promoted.
Eigen- and singular value decompositions are delegated to LAPACK through
``numpy.linalg``; the functions in this module add the tolerance policy and the
contracts the frame code relies on (orthonormal bases, projectors, PSD order).
"""

from __future__ import annotations

from functools import cached_property
from typing import NamedTuple

import numpy as np

from gfusion._tolerance import TOL_PSD, default_rank_tol, tol_rel
from gfusion.errors import (
    AllColumnsNegligible,
    ConvergenceFailure,
    DimensionMismatch,
    NotHermitian,
    NotInvertible,
    NotOrthonormal,
    NotPSD,
)

__all__ = [
    "HermitianMatrix",
    "as_matrix",
    "as_vector",
    "orthonormal_basis",
    "projector",
    "hermitian_eig",
    "sqrt_psd",
    "pseudo_inverse",
    "operator_norm",
    "psd_order",
    "psd_margin",
    "projection_identity_check",
    "is_unitary",
    "inverse",
]


def as_matrix(a, name="matrix") -> np.ndarray:
    """Return ``a`` as a finite 2-D complex array (copying only if needed)."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    return arr


def as_vector(f, dim=None, name="vector") -> np.ndarray:
    vec = np.asarray(f, dtype=np.complex128).reshape(-1)
    if dim is not None and vec.shape[0] != dim:
        raise DimensionMismatch(f"{name} has {vec.shape[0]} entries, expected {dim}")
    if not np.all(np.isfinite(vec)):
        raise ValueError(f"{name} contains NaN or Inf")
    return vec


class HermitianMatrix:
    """Self-adjoint matrix with a lazily cached spectral decomposition.

    The stored matrix is the Hermitian part ``(A + A*) / 2`` of the input, so
    round-off asymmetry never leaks into eigenvalue computations.
    """

    __array_priority__ = 10

    def __init__(self, matrix, tol=None):
        arr = as_matrix(matrix, "HermitianMatrix")
        if arr.shape[0] != arr.shape[1]:
            raise DimensionMismatch(f"Hermitian matrix must be square, got {arr.shape}")
        tol = tol_rel() if tol is None else tol
        skew = np.linalg.norm(arr - arr.conj().T)
        if skew > tol * (1.0 + np.linalg.norm(arr)):
            raise NotHermitian(f"||A - A*||_F = {skew:.3e} exceeds tolerance")
        self._matrix = 0.5 * (arr + arr.conj().T)
        self._matrix.setflags(write=False)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def shape(self):
        return self._matrix.shape

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._matrix
        return self._matrix.astype(dtype)

    def __repr__(self):
        return f"HermitianMatrix(dim={self.dim})"

    @cached_property
    def eig(self):
        """Ascending eigenvalues and a unitary matrix of eigenvectors."""
        if self.dim == 0:
            return np.zeros(0), np.zeros((0, 0), dtype=np.complex128)
        try:
            values, vectors = np.linalg.eigh(self._matrix)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceFailure(str(exc)) from exc
        values.setflags(write=False)
        vectors.setflags(write=False)
        return values, vectors

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.eig[0]

    @property
    def norm(self) -> float:
        values = self.eigenvalues
        return float(np.max(np.abs(values))) if values.size else 0.0

    def spectral_function(self, func) -> "HermitianMatrix":
        """Apply a real function to the spectrum: ``V diag(func(lam)) V*``."""
        values, vectors = self.eig
        return HermitianMatrix((vectors * func(values)) @ vectors.conj().T)

    def inverse(self, rank_tol=None) -> np.ndarray:
        """Spectral (pseudo)inverse; eigenvalues below ``rank_tol * |lam|_max`` map to 0."""
        values, vectors = self.eig
        rank_tol = default_rank_tol(self.shape) if rank_tol is None else rank_tol
        cutoff = rank_tol * self.norm
        inv = np.zeros_like(values)
        keep = np.abs(values) > cutoff
        inv[keep] = 1.0 / values[keep]
        return (vectors * inv) @ vectors.conj().T


def _herm(H) -> HermitianMatrix:
    return H if isinstance(H, HermitianMatrix) else HermitianMatrix(H)


def orthonormal_basis(spanning, rank_tol=None, allow_empty=False) -> np.ndarray:
    """Orthonormal basis for the column span of ``spanning``.

    Columns whose singular value is at most ``rank_tol * sigma_max`` are
    dropped. With ``allow_empty`` a numerically zero span returns an
    ``n x 0`` array instead of raising :class:`AllColumnsNegligible`.
    """
    M = as_matrix(spanning, "spanning")
    n, k = M.shape
    if k == 0:
        if allow_empty:
            return np.zeros((n, 0), dtype=np.complex128)
        raise AllColumnsNegligible("spanning set has no columns")
    rank_tol = default_rank_tol(M.shape) if rank_tol is None else rank_tol
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > rank_tol * smax)) if smax > 0 else 0
    if rank == 0:
        if allow_empty:
            return np.zeros((n, 0), dtype=np.complex128)
        raise AllColumnsNegligible("every singular value is negligible")
    return U[:, :rank]


def check_orthonormal(basis, tol=None) -> float:
    Q = as_matrix(basis, "basis")
    d = Q.shape[1]
    if d == 0:
        return 0.0
    tol = tol_rel() if tol is None else tol
    err = float(np.linalg.norm(Q.conj().T @ Q - np.eye(d)))
    if err > tol * max(1.0, d):
        raise NotOrthonormal(f"||Q*Q - I||_F = {err:.3e}")
    return err


def projector(basis, tol=None) -> HermitianMatrix:
    """Orthogonal projector ``Q Q*`` onto the span of orthonormal columns ``Q``."""
    Q = as_matrix(basis, "basis")
    check_orthonormal(Q, tol)
    return HermitianMatrix(Q @ Q.conj().T)


def hermitian_eig(H):
    """Eigenvalues (ascending) and unitary eigenvectors of a Hermitian matrix."""
    return _herm(H).eig


def sqrt_psd(H, tol_psd=TOL_PSD) -> HermitianMatrix:
    """Principal square root of a positive semidefinite matrix.

    Eigenvalues in ``[-tol_psd*||H||, rank_floor]`` are treated as zero, where
    the floor is the numerical rank cutoff ``n * eps * ||H||``.  Anything more
    negative raises :class:`NotPSD`.
    """
    H = _herm(H)
    values, _ = H.eig
    scale = H.norm
    if values.size and values[0] < -tol_psd * scale:
        raise NotPSD(f"lambda_min = {values[0]:.3e} < -{tol_psd:g} * ||H||")
    floor = default_rank_tol(H.shape) * scale

    def root(lam):
        out = np.zeros_like(lam)
        keep = lam > floor
        out[keep] = np.sqrt(lam[keep])
        return out

    return H.spectral_function(root)


def pseudo_inverse(M, rank_tol=None) -> np.ndarray:
    """Moore-Penrose inverse via SVD; ``sigma <= rank_tol * sigma_max`` counts as zero."""
    M = as_matrix(M)
    if M.size == 0:
        return np.zeros(M.shape[::-1], dtype=np.complex128)
    rank_tol = default_rank_tol(M.shape) if rank_tol is None else rank_tol
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    cutoff = rank_tol * (s[0] if s.size else 0.0)
    inv = np.zeros_like(s)
    keep = s > cutoff
    inv[keep] = 1.0 / s[keep]
    return (Vh.conj().T * inv) @ U.conj().T


def operator_norm(M) -> float:
    """Spectral norm (largest singular value)."""
    M = np.asarray(M, dtype=np.complex128)
    if M.size == 0:
        return 0.0
    if M.ndim == 1:
        return float(np.linalg.norm(M))
    return float(np.linalg.norm(M, 2))


def psd_margin(H1, H2) -> float:
    """``lambda_min(H2 - H1)``; nonnegative exactly when ``H1 <= H2``."""
    A = np.asarray(H1, dtype=np.complex128)
    B = np.asarray(H2, dtype=np.complex128)
    if A.shape != B.shape:
        raise DimensionMismatch(f"cannot compare {A.shape} with {B.shape}")
    return float(HermitianMatrix(B - A).eigenvalues[0])


def psd_order(H1, H2, tol=None) -> bool:
    """Loewner order test ``H1 <= H2`` up to a relative tolerance."""
    tol = tol_rel() if tol is None else tol
    A = np.asarray(H1, dtype=np.complex128)
    B = np.asarray(H2, dtype=np.complex128)
    if A.shape != B.shape:
        raise DimensionMismatch(f"cannot compare {A.shape} with {B.shape}")
    diff = HermitianMatrix(B - A)
    return bool(diff.eigenvalues[0] >= -tol * (1.0 + diff.norm))


def is_unitary(T, tol=None) -> bool:
    T = as_matrix(T)
    if T.shape[0] != T.shape[1]:
        return False
    tol = tol_rel() if tol is None else tol
    return bool(operator_norm(T.conj().T @ T - np.eye(T.shape[0])) <= tol)


def inverse(T, rank_tol=None) -> np.ndarray:
    """Inverse of a square matrix, or :class:`~gfusion.errors.NotInvertible`."""
    T = as_matrix(T)
    if T.shape[0] != T.shape[1]:
        raise NotInvertible(f"non-square matrix {T.shape}")
    s = np.linalg.svd(T, compute_uv=False)
    rank_tol = default_rank_tol(T.shape) if rank_tol is None else rank_tol
    if s.size and (s[0] == 0 or s[-1] <= rank_tol * s[0]):
        raise NotInvertible(f"sigma_min = {s[-1]:.3e}, sigma_max = {s[0]:.3e}")
    return np.linalg.inv(T)


class ProjectionIdentity(NamedTuple):
    holds: bool
    residual: float
    unitary_variant: tuple[bool, float] | None


def projection_identity_check(T, V_basis, tol=None) -> ProjectionIdentity:
    """Check ``P_V T* = P_V T* P_TV`` and, for unitary ``T``, ``P_TV T = T P_V``."""
    T = as_matrix(T, "T")
    V = as_matrix(V_basis, "V_basis")
    n = T.shape[0]
    if T.shape != (n, n) or V.shape[0] != n:
        raise DimensionMismatch(f"T {T.shape} and V {V.shape} are incompatible")
    tol = tol_rel() if tol is None else tol
    P_V = projector(V).matrix
    P_TV = projector(orthonormal_basis(T @ V, allow_empty=True)).matrix
    lhs = P_V @ T.conj().T
    residual = operator_norm(lhs - lhs @ P_TV)
    scale = 1.0 + operator_norm(T)
    unitary = None
    if is_unitary(T, tol):
        r_u = operator_norm(P_TV @ T - T @ P_V)
        unitary = (bool(r_u <= tol * scale), r_u)
    return ProjectionIdentity(bool(residual <= tol * scale), residual, unitary)
