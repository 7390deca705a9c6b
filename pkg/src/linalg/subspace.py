"""
Subspaces as orthonormal column bases, and the algebra on them.

Equality and containment always go through projector distances; bases are not unique.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.linalg.core import ComplexMatrix, adjoint, as_matrix, op_norm, rank_cutoff, svd
from src.utils.config import Tolerances
from src.utils.errors import DimensionMismatch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Subspace:
    ambient_dim: int
    basis: ComplexMatrix  # ambient_dim x rank, orthonormal columns

    def __post_init__(self):
        if self.basis.ndim != 2 or self.basis.shape[0] != self.ambient_dim:
            raise DimensionMismatch(
                f"basis of shape {self.basis.shape} does not fit ambient dimension {self.ambient_dim}"
            )

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    @property
    def is_zero(self) -> bool:
        return self.rank == 0

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, np.zeros((n, 0), dtype=np.complex128))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, np.eye(n, dtype=np.complex128))

    @classmethod
    def span(cls, vectors, tol: Tolerances) -> "Subspace":
        """Orthonormalized span of the columns of `vectors`"""
        return range_closure(as_matrix(vectors), tol)

    def lift(self, local: "Subspace") -> "Subspace":
        """Embed a subspace given in this subspace's coordinates into the ambient space"""
        if local.ambient_dim != self.rank:
            raise DimensionMismatch(f"local subspace lives in dim {local.ambient_dim}, expected {self.rank}")
        return Subspace(self.ambient_dim, self.basis @ local.basis)

    def coordinates(self, other: "Subspace") -> ComplexMatrix:
        """Coordinates of other's basis in this basis (valid when other lies inside self)"""
        _same_ambient(self, other)
        return adjoint(self.basis) @ other.basis


def _same_ambient(*spaces: Subspace) -> None:
    dims = {s.ambient_dim for s in spaces}
    if len(dims) > 1:
        raise DimensionMismatch(f"subspaces live in different ambient dimensions {sorted(dims)}")


def kernel(A: ComplexMatrix, tol: Tolerances, scale: Optional[float] = None) -> Subspace:
    """N(A): right singular vectors with sigma at or below the rank cutoff"""
    M = as_matrix(A)
    rows, cols = M.shape
    _, s, V = svd(M, tol)
    cutoff = rank_cutoff(s, M.shape, tol, scale)
    sigma_full = np.zeros(cols)
    sigma_full[: s.size] = s
    return Subspace(cols, V[:, sigma_full <= cutoff])


def range_closure(A: ComplexMatrix, tol: Tolerances, scale: Optional[float] = None) -> Subspace:
    """Closure of R(A): left singular vectors with sigma above the rank cutoff"""
    M = as_matrix(A)
    U, s, _ = svd(M, tol)
    cutoff = rank_cutoff(s, M.shape, tol, scale)
    r = int(np.count_nonzero(s > cutoff))
    return Subspace(M.shape[0], U[:, :r])


def projector(S: Subspace) -> ComplexMatrix:
    return S.basis @ adjoint(S.basis)


def compress(T: ComplexMatrix, source: Subspace, target: Subspace) -> ComplexMatrix:
    """Block of T from `source` to `target` in their bases: target* T source"""
    n = T.shape[0]
    if T.shape != (n, n) or source.ambient_dim != n or target.ambient_dim != n:
        raise DimensionMismatch(
            f"cannot compress operator of shape {T.shape} between dims "
            f"{source.ambient_dim} and {target.ambient_dim}"
        )
    return adjoint(target.basis) @ T @ source.basis


def complement(S: Subspace, tol: Tolerances) -> Subspace:
    return kernel(adjoint(S.basis), tol, scale=1.0) if S.rank else Subspace.full(S.ambient_dim)


def direct_sum(*spaces: Subspace, tol: Tolerances) -> Subspace:
    """Span of the union (the sum S1 + S2 + ...)"""
    _same_ambient(*spaces)
    n = spaces[0].ambient_dim
    stacked = np.hstack([s.basis for s in spaces]) if spaces else np.zeros((n, 0))
    if stacked.shape[1] == 0:
        return Subspace.zero(n)
    return range_closure(stacked, tol, scale=1.0)


def intersect(S1: Subspace, S2: Subspace, tol: Tolerances) -> Subspace:
    """Common vectors: the kernel of (I - P1) + (I - P2) = 2I - P1 - P2"""
    _same_ambient(S1, S2)
    if S1.is_zero or S2.is_zero:
        return Subspace.zero(S1.ambient_dim)
    n = S1.ambient_dim
    gap = 2 * np.eye(n) - projector(S1) - projector(S2)
    return kernel(gap, tol, scale=2.0)


def containment_residual(outer: Subspace, inner: Subspace) -> float:
    """||(I - P_outer) P_inner||"""
    _same_ambient(outer, inner)
    if inner.is_zero:
        return 0.0
    leak = inner.basis - outer.basis @ (adjoint(outer.basis) @ inner.basis)
    return op_norm(leak)


def contains(outer: Subspace, inner: Subspace, tol: Tolerances) -> bool:
    """inner is a subspace of outer"""
    return containment_residual(outer, inner) <= tol.eq


def distance(S1: Subspace, S2: Subspace) -> float:
    """||P1 - P2||"""
    _same_ambient(S1, S2)
    return op_norm(projector(S1) - projector(S2))


def equal(S1: Subspace, S2: Subspace, tol: Tolerances) -> bool:
    return distance(S1, S2) <= tol.eq


def orthogonality_residual(S1: Subspace, S2: Subspace) -> float:
    _same_ambient(S1, S2)
    if S1.is_zero or S2.is_zero:
        return 0.0
    return op_norm(adjoint(S1.basis) @ S2.basis)


def invariance_residual(T: ComplexMatrix, S: Subspace) -> float:
    """||(I - P_S) T P_S||; zero iff T S is contained in S"""
    if S.is_zero:
        return 0.0
    image = T @ S.basis
    return op_norm(image - S.basis @ (adjoint(S.basis) @ image))


def subspace_algebra(op: str, S1: Subspace, S2: Optional[Subspace], tol: Tolerances):
    """Dispatch form used by the CLI and the suites"""
    if op == "complement":
        return complement(S1, tol)
    if S2 is None:
        raise DimensionMismatch(f"operation '{op}' needs two subspaces")
    if op == "sum":
        return direct_sum(S1, S2, tol=tol)
    if op == "intersect":
        return intersect(S1, S2, tol)
    if op == "contains":
        return contains(S1, S2, tol)
    if op == "equal":
        return equal(S1, S2, tol)
    raise ValueError(f"unknown subspace operation '{op}'")
