"""
Operator functions: modulus, real part, the Fong-Tsui condition |T| <= |Re T|,
the polar factor of Re T and the Douglas factor A with A |Re T|^(1/2) = |T|^(1/2).
"""

import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from src.linalg.core import (
    ComplexMatrix,
    adjoint,
    fro,
    hermitian_eig,
    hermitian_part,
    loewner_leq,
    min_eigvec,
    op_norm,
    rank_cutoff,
    require_square,
    svd,
)
from src.linalg.subspace import equal, kernel
from src.utils.config import Tolerances

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OperatorFunctions:
    modulus: ComplexMatrix          # |T|
    real_part: ComplexMatrix        # Re T
    abs_real_part: ComplexMatrix    # |Re T|
    norm: float                     # sigma_max
    singular_values: npt.NDArray[np.float64]
    real_part_eigenvalues: npt.NDArray[np.float64]


@dataclass(frozen=True)
class PolarRealPart:
    u_tilde: ComplexMatrix          # symmetry on the range of Re T, zero on its kernel
    abs_real_part: ComplexMatrix
    fixed_points_match: bool        # N(I - |Re T|) == N(U~ - Re T)


@dataclass(frozen=True)
class ConditionReport:
    fong_tsui_holds: bool
    fong_tsui_defect: float         # min eig of |Re T| - |T|
    fong_istratescu_holds: bool
    fong_istratescu_defect: float   # min eig of (Re T)^2 - T*T
    self_adjoint: bool
    asymmetry: float                # ||T - T*||_F / ||T||_F
    mortad_commutes: bool
    mortad_residual: float
    violated_direction: ComplexMatrix  # eigenvector of |Re T| - |T| at its min eigenvalue


@dataclass(frozen=True)
class DouglasFactor:
    a: ComplexMatrix
    norm_a: float
    residual: float
    range_condition: bool           # residual within tolerance
    is_contraction: bool            # norm_a <= 1 + tol.psd
    real_square_contraction: bool   # A |Re T|^2 A* <= |Re T|^2
    real_square_defect: float
    modulus_square_bound: bool      # |T|^2 <= A |Re T|^2 A*
    modulus_square_defect: float


def asymmetry(T: ComplexMatrix) -> float:
    norm = fro(T)
    return fro(T - adjoint(T)) / norm if norm > 0 else 0.0


def operator_functions(T: ComplexMatrix, tol: Tolerances) -> OperatorFunctions:
    """
    |T| via the SVD (equal to psd_sqrt(T*T), without squaring the small singular values),
    Re T and |Re T| via the eigendecomposition of Re T.
    """
    T = require_square(T)
    _, s, V = svd(T, tol)
    modulus = hermitian_part((V * s) @ adjoint(V))
    real_part = hermitian_part(T)
    eig = hermitian_eig(real_part, tol)
    abs_real_part = eig.apply(np.abs)
    norm = float(s[0]) if s.size else 0.0
    return OperatorFunctions(modulus, real_part, abs_real_part, norm, s, eig.eigenvalues)


def polar_real_part(T: ComplexMatrix, tol: Tolerances) -> PolarRealPart:
    """Re T = U~ |Re T| with U~ = Q sign(Lambda) Q*, sign(0) = 0"""
    T = require_square(T)
    n = T.shape[0]
    eig = hermitian_eig(hermitian_part(T), tol)
    lam = eig.eigenvalues
    cutoff = tol.rank * (float(np.max(np.abs(lam))) if lam.size else 0.0) * max(n, 1)
    signs = np.where(np.abs(lam) > cutoff, np.sign(lam), 0.0)
    u_tilde = eig.apply(lambda _: signs)
    abs_re = eig.apply(np.abs)
    identity = np.eye(n)
    fixed_abs = kernel(identity - abs_re, tol, scale=1.0)
    fixed_u = kernel(u_tilde - hermitian_part(T), tol, scale=1.0)
    return PolarRealPart(u_tilde, abs_re, equal(fixed_abs, fixed_u, tol))


def fong_tsui_check(T: ComplexMatrix, tol: Tolerances) -> ConditionReport:
    T = require_square(T)
    funcs = operator_functions(T, tol)
    n = T.shape[0]
    ft_holds, ft_defect = loewner_leq(funcs.modulus, funcs.abs_real_part, tol)
    fi_holds, fi_defect = loewner_leq(adjoint(T) @ T, funcs.real_part @ funcs.real_part, tol)
    asym = asymmetry(T)
    self_adjoint = fro(T - adjoint(T)) <= tol.eq * fro(T)

    polar = polar_real_part(T, tol)
    U = polar.u_tilde
    mortad_residual = op_norm(T @ U - U @ T)
    mortad = mortad_residual <= tol.eq * max(funcs.norm, 1.0)

    if n:
        _, direction = min_eigvec(hermitian_part(funcs.abs_real_part - funcs.modulus), tol)
    else:
        direction = np.zeros(0, dtype=np.complex128)
    if ft_holds and not self_adjoint:
        logger.error(f"|T| <= |Re T| holds on a non-self-adjoint operator (asymmetry {asym:.3e})")
    return ConditionReport(
        fong_tsui_holds=ft_holds,
        fong_tsui_defect=ft_defect,
        fong_istratescu_holds=fi_holds,
        fong_istratescu_defect=fi_defect,
        self_adjoint=self_adjoint,
        asymmetry=asym,
        mortad_commutes=mortad,
        mortad_residual=mortad_residual,
        violated_direction=direction,
    )


def _half_power(values: npt.NDArray[np.float64], vectors: ComplexMatrix, cutoff: float,
                inverse: bool = False) -> ComplexMatrix:
    keep = values > cutoff
    safe = np.where(keep, values, 1.0)
    if inverse:
        weights = np.where(keep, 1.0 / np.sqrt(safe), 0.0)
    else:
        weights = np.where(keep, np.sqrt(safe), 0.0)
    return hermitian_part((vectors * weights) @ adjoint(vectors))


def douglas_factor(T: ComplexMatrix, tol: Tolerances) -> DouglasFactor:
    """
    Minimal-norm solution A = |T|^(1/2) pinv(|Re T|^(1/2)).

    Both half powers come straight from the spectral data of T and Re T; spectral values
    at or below the rank cutoff count as zero in both, so kernel noise is not amplified.
    """
    T = require_square(T)
    n = T.shape[0]
    _, s, V = svd(T, tol)
    mod_half = _half_power(s, V, rank_cutoff(s, T.shape, tol))
    eig = hermitian_eig(hermitian_part(T), tol)
    abs_lam = np.abs(eig.eigenvalues)
    re_cut = tol.rank * (float(abs_lam.max()) if n else 0.0) * max(n, 1)
    re_half = _half_power(abs_lam, eig.eigenvectors, re_cut)
    re_half_pinv = _half_power(abs_lam, eig.eigenvectors, re_cut, inverse=True)

    A = mod_half @ re_half_pinv
    residual = fro(A @ re_half - mod_half)
    norm_a = op_norm(A)
    scale = max(fro(mod_half), 1.0)
    range_condition = residual <= tol.eq * scale

    abs_re = eig.apply(np.abs)
    re_sq = abs_re @ abs_re
    pushed = hermitian_part(A @ re_sq @ adjoint(A))
    rs_holds, rs_defect = loewner_leq(pushed, hermitian_part(re_sq), tol)
    mod_sq = hermitian_part(adjoint(T) @ T)
    ms_holds, ms_defect = loewner_leq(mod_sq, pushed, tol)
    return DouglasFactor(
        a=A,
        norm_a=norm_a,
        residual=residual,
        range_condition=range_condition,
        is_contraction=norm_a <= 1.0 + tol.psd,
        real_square_contraction=rs_holds,
        real_square_defect=rs_defect,
        modulus_square_bound=ms_holds,
        modulus_square_defect=ms_defect,
    )
