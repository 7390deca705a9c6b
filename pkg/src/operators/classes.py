"""
Membership checkers for the operator classes: contractions, partial isometries,
m-quasi-isometries, 2-isometries, Brownian isometries, hyponormal and nilpotent operators.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional

import numpy as np

from src.linalg.core import (
    ComplexMatrix,
    adjoint,
    fro,
    hermitian_part,
    loewner_leq,
    matrix_power,
    op_norm,
    require_square,
)
from src.linalg.subspace import Subspace, compress, kernel, range_closure
from src.utils.config import Tolerances
from src.utils.errors import NotTwoIsometry, SigmaZero, StructureMismatch, ToolkitError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClassFlag:
    holds: bool
    residual: float


@dataclass
class ClassMembership:
    contraction: ClassFlag
    pure_contraction: ClassFlag
    isometry: ClassFlag
    unitary: ClassFlag
    symmetry: ClassFlag
    partial_isometry: ClassFlag
    scaled_partial_isometry: ClassFlag
    hyponormal: ClassFlag
    normal: ClassFlag
    self_adjoint: ClassFlag
    two_isometry: ClassFlag
    nilpotent_order: Optional[int]
    m_quasi_isometry: Dict[int, ClassFlag] = field(default_factory=dict)
    brownian_sigma: Optional[float] = None
    brownian_reason: str = ""


@dataclass(frozen=True)
class BrownianDecomposition:
    sigma: float
    h0: Subspace
    h1: Subspace
    v: ComplexMatrix
    e: ComplexMatrix
    u: ComplexMatrix


@dataclass(frozen=True)
class TwoIsometryStructure:
    g: Subspace                     # N(T*T - I)
    g_perp: Subspace                # closure of R(T*T - I)
    s: ComplexMatrix
    r: ComplexMatrix
    q: ComplexMatrix
    lower_left: float
    s_isometry: float
    s_star_r: float
    delta_injective: bool
    delta_min_singular: float
    q_identity: float               # ||Q*(R*R + Q*Q - I)Q - (R*R + Q*Q - I)||


def _scale(T: ComplexMatrix, power: int) -> float:
    return max(op_norm(T) ** power, 1.0)


def partial_isometry_residual(T: ComplexMatrix) -> float:
    """||(T*T)^2 - T*T||; zero iff T*T is an orthogonal projection"""
    if T.size == 0:
        return 0.0
    P = hermitian_part(adjoint(T) @ T)
    return op_norm(P @ P - P)


def quasi_isometry_residual(T: ComplexMatrix, m: int) -> float:
    Tm = matrix_power(T, m)
    Tm1 = Tm @ T
    return op_norm(adjoint(Tm1) @ Tm1 - adjoint(Tm) @ Tm)


def two_isometry_residual(T: ComplexMatrix) -> float:
    n = T.shape[0]
    T2 = T @ T
    return op_norm(adjoint(T2) @ T2 - 2 * adjoint(T) @ T + np.eye(n))


def nilpotent_order(T: ComplexMatrix, tol: Tolerances) -> Optional[int]:
    """Least k <= n with ||T^k|| <= tol.eq ||T||^k"""
    n = T.shape[0]
    norm = op_norm(T)
    power = np.eye(n, dtype=np.complex128)
    for k in range(1, n + 1):
        power = power @ T
        if op_norm(power) <= tol.eq * norm ** k:
            return k
    return None


def classify(T: ComplexMatrix, m_list: Iterable[int], tol: Tolerances) -> ClassMembership:
    T = require_square(T)
    n = T.shape[0]
    identity = np.eye(n)
    TsT = hermitian_part(adjoint(T) @ T)
    TTs = hermitian_part(T @ adjoint(T))
    norm = op_norm(T)
    s2 = _scale(T, 2)

    contraction = ClassFlag(norm <= 1.0 + tol.psd, norm)
    iso_res = op_norm(TsT - identity)
    co_res = op_norm(TTs - identity)
    isometry = ClassFlag(iso_res <= tol.eq * s2, iso_res)
    unitary = ClassFlag(isometry.holds and co_res <= tol.eq * s2, max(iso_res, co_res))
    sa_res = fro(T - adjoint(T))
    self_adjoint = ClassFlag(sa_res <= tol.eq * fro(T), sa_res)
    symmetry = ClassFlag(unitary.holds and self_adjoint.holds, max(unitary.residual, sa_res))

    pi_res = partial_isometry_residual(T)
    partial_isometry = ClassFlag(pi_res <= tol.eq * s2, pi_res)
    if norm > 0:
        spi_res = partial_isometry_residual(T / norm)
        scaled_pi = ClassFlag(spi_res <= tol.eq, spi_res)
    else:
        scaled_pi = ClassFlag(True, 0.0)

    hypo_holds, hypo_defect = loewner_leq(TTs, TsT, tol)
    hyponormal = ClassFlag(hypo_holds, hypo_defect)
    normal_res = op_norm(TsT - TTs)
    normal = ClassFlag(normal_res <= tol.eq * s2, normal_res)

    if contraction.holds:
        defect_space = kernel(identity - TsT, tol, scale=1.0)
        pure = ClassFlag(defect_space.is_zero, float(defect_space.rank))
    else:
        pure = ClassFlag(False, norm)

    two_res = two_isometry_residual(T)
    two_isometry = ClassFlag(two_res <= tol.eq * _scale(T, 4), two_res)

    quasi: Dict[int, ClassFlag] = {}
    for m in sorted(set(m_list)):
        if m < 1:
            raise ValueError(f"quasi-isometry order must be >= 1, got {m}")
        res = quasi_isometry_residual(T, m)
        quasi[m] = ClassFlag(res <= tol.eq * _scale(T, 2 * (m + 1)), res)

    membership = ClassMembership(
        contraction=contraction,
        pure_contraction=pure,
        isometry=isometry,
        unitary=unitary,
        symmetry=symmetry,
        partial_isometry=partial_isometry,
        scaled_partial_isometry=scaled_pi,
        hyponormal=hyponormal,
        normal=normal,
        self_adjoint=self_adjoint,
        two_isometry=two_isometry,
        nilpotent_order=nilpotent_order(T, tol),
        m_quasi_isometry=quasi,
    )
    try:
        membership.brownian_sigma = brownian_decompose(T, tol).sigma
        membership.brownian_reason = "brownian isometry"
    except ToolkitError as e:
        membership.brownian_reason = f"{type(e).__name__}: {e}"
    _enforce_implications(membership, T, tol)
    return membership


def _enforce_implications(c: ClassMembership, T: ComplexMatrix, tol: Tolerances) -> None:
    """symmetry => unitary => isometry => contraction; injective partial isometry => isometry"""
    if c.symmetry.holds and not c.unitary.holds:
        c.unitary = ClassFlag(True, c.unitary.residual)
    if c.unitary.holds and not c.isometry.holds:
        c.isometry = ClassFlag(True, c.isometry.residual)
    if c.partial_isometry.holds and not c.isometry.holds and kernel(T, tol, scale=1.0).is_zero:
        c.isometry = ClassFlag(True, c.isometry.residual)
    if c.isometry.holds and not c.contraction.holds:
        c.contraction = ClassFlag(True, c.contraction.residual)


def brownian_decompose(T: ComplexMatrix, tol: Tolerances) -> BrownianDecomposition:
    """
    Block form [[V, sigma E], [0, U]] on N(T*T - I) + closure R(T*T - I).

    Rejects with the first failed condition.
    """
    T = require_square(T)
    n = T.shape[0]
    res = two_isometry_residual(T)
    if res > tol.eq * _scale(T, 4):
        raise NotTwoIsometry(f"T*^2 T^2 - 2T*T + I has norm {res:.3e}")
    D = hermitian_part(adjoint(T) @ T) - np.eye(n)
    sigma_sq = op_norm(D)
    if sigma_sq <= tol.eq * _scale(T, 2):
        raise SigmaZero(f"||T*T - I|| = {sigma_sq:.3e}; T is unitary")
    sigma = float(np.sqrt(sigma_sq))
    h0 = kernel(D, tol, scale=1.0)
    h1 = range_closure(D, tol, scale=1.0)
    scale = max(op_norm(T), 1.0)
    v = compress(T, h0, h0)
    e = compress(T, h1, h0) / sigma
    u = compress(T, h1, h1)
    checks = [
        ("lower-left block vanishes", op_norm(compress(T, h0, h1))),
        ("V isometric on H0", op_norm(adjoint(v) @ v - np.eye(h0.rank))),
        ("U unitary on H1", max(op_norm(adjoint(u) @ u - np.eye(h1.rank)),
                                op_norm(u @ adjoint(u) - np.eye(h1.rank)))),
        ("range(E) in N(V*)", op_norm(adjoint(v) @ e)),
        ("U commutes with E*E", op_norm(u @ adjoint(e) @ e - adjoint(e) @ e @ u)),
    ]
    for name, residual in checks:
        if residual > tol.eq * scale * max(n, 1):
            raise StructureMismatch(name, residual)
    return BrownianDecomposition(sigma, h0, h1, v, e, u)


def two_isometry_structure(T: ComplexMatrix, tol: Tolerances) -> TwoIsometryStructure:
    """Upper triangular form of a 2-isometry on N(T*T - I) + closure R(T*T - I) with its residuals"""
    T = require_square(T)
    n = T.shape[0]
    res = two_isometry_residual(T)
    if res > tol.eq * _scale(T, 4):
        raise NotTwoIsometry(f"T*^2 T^2 - 2T*T + I has norm {res:.3e}")
    D = hermitian_part(adjoint(T) @ T) - np.eye(n)
    g = kernel(D, tol, scale=1.0)
    g_perp = range_closure(D, tol, scale=1.0)
    S = compress(T, g, g)
    R = compress(T, g_perp, g)
    Q = compress(T, g_perp, g_perp)
    k = g_perp.rank
    delta = adjoint(R) @ R + adjoint(Q) @ Q - np.eye(k)
    if k:
        sv = np.linalg.svd(delta, compute_uv=False)
        delta_min = float(sv[-1])
        delta_injective = kernel(delta, tol, scale=1.0).is_zero
    else:
        delta_min, delta_injective = 0.0, True
    return TwoIsometryStructure(
        g=g,
        g_perp=g_perp,
        s=S,
        r=R,
        q=Q,
        lower_left=op_norm(compress(T, g, g_perp)),
        s_isometry=op_norm(adjoint(S) @ S - np.eye(g.rank)),
        s_star_r=op_norm(adjoint(S) @ R),
        delta_injective=delta_injective,
        delta_min_singular=delta_min,
        q_identity=op_norm(adjoint(Q) @ delta @ Q - delta),
    )
