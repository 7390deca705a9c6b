"""
Dense complex linear algebra primitives

Rank decisions use one relative cutoff, tol.rank * max(sigma_max, scale) * max(rows, cols).
`scale` is the reference magnitude of a matrix built as a difference (I - T*T, T2 of a
contraction): its rounding error is relative to that reference, not to its own sigma_max.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import numpy.typing as npt
import scipy.linalg

from src.utils.config import Tolerances
from src.utils.errors import DimensionMismatch, InvalidMatrix, NoConvergence, NotHermitian, NotPSD

logger = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]


def as_matrix(A) -> ComplexMatrix:
    """Validate and convert input to a finite 2-D complex array"""
    M = np.asarray(A)
    if M.ndim != 2:
        raise InvalidMatrix(f"expected a 2-D matrix, got {M.ndim} dimensions")
    if not np.issubdtype(M.dtype, np.number):
        raise InvalidMatrix(f"non-numeric matrix dtype {M.dtype}")
    M = M.astype(np.complex128)
    if not np.all(np.isfinite(M)):
        raise InvalidMatrix("matrix contains NaN or Inf entries")
    return M


def require_square(A: ComplexMatrix) -> ComplexMatrix:
    M = as_matrix(A)
    if M.shape[0] != M.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {M.shape}")
    return M


def adjoint(A: ComplexMatrix) -> ComplexMatrix:
    return A.conj().T


def op_norm(A: ComplexMatrix) -> float:
    """Spectral norm; 0 for empty matrices"""
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def fro(A: ComplexMatrix) -> float:
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, "fro"))


def hermitian_part(A: ComplexMatrix) -> ComplexMatrix:
    return (A + adjoint(A)) / 2


def is_hermitian(A: ComplexMatrix, tol: Tolerances) -> bool:
    return fro(A - adjoint(A)) <= tol.eq * fro(A)


@dataclass(frozen=True)
class HermitianEigen:
    eigenvalues: npt.NDArray[np.float64]  # ascending
    eigenvectors: ComplexMatrix           # unitary

    def reconstruct(self) -> ComplexMatrix:
        Q = self.eigenvectors
        return (Q * self.eigenvalues) @ adjoint(Q)

    def apply(self, fn) -> ComplexMatrix:
        """Q * diag(fn(lambda)) * Q*"""
        Q = self.eigenvectors
        return hermitian_part((Q * fn(self.eigenvalues)) @ adjoint(Q))


def hermitian_eig(A: ComplexMatrix, tol: Tolerances) -> HermitianEigen:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending"""
    M = require_square(A)
    if not is_hermitian(M, tol):
        raise NotHermitian(f"matrix is not Hermitian (asymmetry {fro(M - adjoint(M)):.3e})")
    n = M.shape[0]
    if n == 0:
        return HermitianEigen(np.zeros(0), np.zeros((0, 0), dtype=np.complex128))
    try:
        w, Q = scipy.linalg.eigh(hermitian_part(M))
    except np.linalg.LinAlgError as e:
        raise NoConvergence(f"Hermitian eigensolver failed: {e}") from e
    # eigh is ascending with stable ordering for identical input
    return HermitianEigen(np.asarray(w, dtype=np.float64), np.asarray(Q, dtype=np.complex128))


def svd(A: ComplexMatrix, tol: Tolerances) -> Tuple[ComplexMatrix, npt.NDArray[np.float64], ComplexMatrix]:
    """
    Full SVD A = U diag(sigma) V*, sigma descending

    Returns (U, sigma, V) with V (not V*) so columns of V are right singular vectors.
    """
    M = as_matrix(A)
    rows, cols = M.shape
    if M.size == 0:
        return (np.eye(rows, dtype=np.complex128), np.zeros(0), np.eye(cols, dtype=np.complex128))
    try:
        U, s, Vh = scipy.linalg.svd(M, full_matrices=True, lapack_driver="gesdd")
    except np.linalg.LinAlgError:
        logger.debug("gesdd failed, retrying with gesvd")
        try:
            U, s, Vh = scipy.linalg.svd(M, full_matrices=True, lapack_driver="gesvd")
        except np.linalg.LinAlgError as e:
            raise NoConvergence(f"SVD failed: {e}") from e
    return U, np.asarray(s, dtype=np.float64), adjoint(Vh)


def rank_cutoff(sigma: npt.NDArray[np.float64], shape: Tuple[int, int], tol: Tolerances,
                scale: Optional[float] = None) -> float:
    sigma_max = float(sigma[0]) if sigma.size else 0.0
    reference = max(sigma_max, scale or 0.0)
    return tol.rank * reference * max(shape)


def psd_sqrt(A: ComplexMatrix, tol: Tolerances) -> ComplexMatrix:
    """Principal square root of a Hermitian PSD matrix; small negatives are clamped"""
    eig = hermitian_eig(A, tol)
    if eig.eigenvalues.size == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    norm = float(np.max(np.abs(eig.eigenvalues)))
    lam_min = float(eig.eigenvalues[0])
    if lam_min < -tol.psd * norm:
        raise NotPSD(f"minimum eigenvalue {lam_min:.3e} below slack {-tol.psd * norm:.3e}")
    return eig.apply(lambda lam: np.sqrt(np.clip(lam, 0.0, None)))


def pinv(A: ComplexMatrix, tol: Tolerances, cutoff: Optional[float] = None) -> ComplexMatrix:
    """
    Moore-Penrose pseudoinverse with the tol.rank cutoff.

    An explicit absolute `cutoff` replaces the relative one.
    """
    M = as_matrix(A)
    U, s, V = svd(M, tol)
    if cutoff is None:
        cutoff = rank_cutoff(s, M.shape, tol)
    keep = s > cutoff
    r = int(np.count_nonzero(keep))
    return (V[:, :r] / s[:r]) @ adjoint(U[:, :r])


def loewner_leq(A: ComplexMatrix, B: ComplexMatrix, tol: Tolerances) -> Tuple[bool, float]:
    """
    A <= B in the Loewner order.

    Returns (holds, defect) with defect = min eigenvalue of B - A.
    """
    A = require_square(A)
    B = require_square(B)
    if A.shape != B.shape:
        raise DimensionMismatch(f"Loewner comparison of shapes {A.shape} and {B.shape}")
    for name, M in (("left", A), ("right", B)):
        if not is_hermitian(M, tol):
            raise NotHermitian(f"{name} operand of Loewner comparison is not Hermitian")
    if A.shape[0] == 0:
        return True, 0.0
    defect = float(scipy.linalg.eigvalsh(hermitian_part(B - A))[0])
    slack = tol.psd * max(op_norm(A), op_norm(B), 1.0)
    return defect >= -slack, defect


def min_eigvec(A: ComplexMatrix, tol: Tolerances) -> Tuple[float, ComplexMatrix]:
    """Smallest eigenvalue of a Hermitian matrix and a unit eigenvector for it"""
    eig = hermitian_eig(A, tol)
    return float(eig.eigenvalues[0]), eig.eigenvectors[:, 0]


def matrix_power(A: ComplexMatrix, k: int) -> ComplexMatrix:
    return np.linalg.matrix_power(A, k)
