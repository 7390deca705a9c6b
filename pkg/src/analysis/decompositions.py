"""
Subspace constructions for a contraction T:

- the asymptotic limit S_T = lim T*^n T^n and its isometric subspace N(I - S_T)
- the maximum invariant subspace M on which T is a partial isometry, with the
  two-block form on M + M_perp and the three-block form on N(T) + H1 + H2
- the three-part form on N(T) + N(I - T*T) + H'
- the comparison of M with the corresponding subspace M* of T*
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from src.analysis.blocks import BlockDecomposition, block_decomposition
from src.linalg.core import ComplexMatrix, adjoint, fro, hermitian_part, loewner_leq, op_norm, require_square
from src.linalg.subspace import (
    Subspace,
    complement,
    compress,
    containment_residual,
    direct_sum,
    distance,
    equal,
    invariance_residual,
    kernel,
    range_closure,
)
from src.operators.classes import partial_isometry_residual
from src.utils.config import Tolerances
from src.utils.errors import NoConvergence, NotContraction, SpanMismatch, TheoremViolation

logger = logging.getLogger(__name__)


def require_contraction(T: ComplexMatrix, tol: Tolerances) -> ComplexMatrix:
    T = require_square(T)
    norm = op_norm(T)
    if norm > 1.0 + tol.psd:
        raise NotContraction(f"||T|| = {norm:.12g} exceeds 1")
    return T


def defect_space(T: ComplexMatrix, tol: Tolerances) -> Subspace:
    """N(I - T*T), the subspace where the contraction T is isometric"""
    n = T.shape[0]
    return kernel(np.eye(n) - hermitian_part(adjoint(T) @ T), tol, scale=1.0)


def coisometric_space(T: ComplexMatrix, tol: Tolerances) -> Subspace:
    """N(I - TT*)"""
    n = T.shape[0]
    return kernel(np.eye(n) - hermitian_part(T @ adjoint(T)), tol, scale=1.0)


def intermediate_space(T: ComplexMatrix, tol: Tolerances) -> Subspace:
    """H' = closure of R(T*T - (T*T)^2)"""
    P = hermitian_part(adjoint(T) @ T)
    return range_closure(P - P @ P, tol, scale=1.0)


@dataclass(frozen=True)
class AsymptoticLimit:
    s_t: ComplexMatrix
    iterations: int                 # squaring steps taken
    power: int                      # S_T is read off T*^power T^power
    max_isometric: Subspace


def asymptotic_limit(T: ComplexMatrix, tol: Tolerances) -> AsymptoticLimit:
    """
    S_T = lim T*^k T^k, sampled at k = 2^j by repeated squaring of T.

    Stops once consecutive samples differ by at most tol.conv * n in Frobenius norm.
    """
    T = require_contraction(T, tol)
    n = T.shape[0]
    A = np.eye(n, dtype=np.complex128)
    P = T.copy()
    threshold = tol.conv * max(n, 1)
    power = 1
    step = float("inf")
    for j in range(1, tol.max_iter + 1):
        A_next = hermitian_part(adjoint(P) @ P)
        step = fro(A_next - A)
        A = A_next
        if step <= threshold:
            logger.debug(f"asymptotic limit settled at power {power} after {j} steps")
            return AsymptoticLimit(A, j, power, kernel(np.eye(n) - A, tol, scale=1.0))
        P = P @ P
        power *= 2
    raise NoConvergence(f"T*^k T^k did not settle within {tol.max_iter} squarings (last step {step:.3e})")


@dataclass
class MaxPartialIsometricResult:
    m: Subspace
    h0: Subspace                    # N(T)
    h1: Subspace                    # N(T2), inside N(I - T*T)
    h2: Subspace                    # M_perp
    isometric: Subspace             # N(I - T*T)
    two_block: BlockDecomposition   # W, R, Q on M + M_perp
    three_block: BlockDecomposition  # on H0 + H1 + H2
    eq22_holds: bool                # criterion N(I - T*T) meet M_perp inside N(R)
    eq22_equality: bool             # N(T) + N(I - T*T) = M + N(I - Q*Q), tested directly
    n_sum_invariant: bool
    q_pure: bool
    m_is_full_sum: bool
    residuals: Dict[str, float] = field(default_factory=dict)
    flags: Dict[str, bool] = field(default_factory=dict)

    @property
    def w(self) -> ComplexMatrix:
        return self.two_block.blocks[0][0]

    @property
    def r(self) -> ComplexMatrix:
        return self.two_block.blocks[0][1]

    @property
    def q(self) -> ComplexMatrix:
        return self.two_block.blocks[1][1]

    @property
    def invariants_hold(self) -> bool:
        return all(self.flags.values())


def max_partial_isometric_subspace(T: ComplexMatrix, tol: Tolerances) -> MaxPartialIsometricResult:
    T = require_contraction(T, tol)
    n = T.shape[0]
    h0 = kernel(T, tol, scale=1.0)
    K = defect_space(T, tol)
    h_prime = intermediate_space(T, tol)
    T2 = compress(T, K, h_prime)
    h1_local = kernel(T2, tol, scale=1.0)
    h1 = K.lift(h1_local)
    m = direct_sum(h0, h1, tol=tol)
    h2 = complement(m, tol)
    logger.debug(f"max partial isometric subspace: dim N(T)={h0.rank} dim K={K.rank} "
                 f"dim H'={h_prime.rank} dim H1={h1.rank} dim M={m.rank}")

    two_block = block_decomposition(T, [m, h2], ["M", "M_perp"], tol)
    three_block = block_decomposition(T, [h0, h1, h2], ["H0=N(T)", "H1", "H2"], tol)
    W, R, Q = two_block.blocks[0][0], two_block.blocks[0][1], two_block.blocks[1][1]

    residuals: Dict[str, float] = {}
    flags: Dict[str, bool] = {}

    full_sum = direct_sum(h0, K, tol=tol)
    residuals["sandwich_lower"] = containment_residual(m, h0)
    residuals["sandwich_upper"] = containment_residual(full_sum, m)
    residuals["invariance"] = invariance_residual(T, m)
    residuals["w_partial_isometry"] = partial_isometry_residual(W)
    residuals["w_star_r"] = op_norm(adjoint(W) @ R)
    q_isometric = h2.lift(kernel(np.eye(h2.rank) - hermitian_part(adjoint(Q) @ Q), tol, scale=1.0))
    residuals["q_isometric_inside_t_isometric"] = containment_residual(K, q_isometric)
    for name in ("sandwich_lower", "sandwich_upper", "invariance", "w_partial_isometry",
                 "w_star_r", "q_isometric_inside_t_isometric"):
        flags[name] = residuals[name] <= tol.eq * max(n, 1)

    _three_block_relations(three_block, tol, residuals, flags)

    # N(I - T*T) meet M_perp is the part of K orthogonal to H1
    rest_local = complement(h1_local, tol)
    k_perp_m = K.lift(rest_local)
    residuals["eq22_criterion"] = op_norm(compress(T, k_perp_m, m))
    eq22_holds = residuals["eq22_criterion"] <= tol.eq * max(n, 1)
    rhs = direct_sum(m, q_isometric, tol=tol)
    residuals["eq22_distance"] = distance(full_sum, rhs)
    eq22_equality = residuals["eq22_distance"] <= tol.eq * max(n, 1)

    residuals["n_sum_invariance"] = invariance_residual(T, full_sum)
    n_sum_invariant = residuals["n_sum_invariance"] <= tol.eq * max(n, 1)
    q_pure = q_isometric.is_zero
    m_is_full_sum = equal(m, full_sum, tol)

    result = MaxPartialIsometricResult(
        m=m, h0=h0, h1=h1, h2=h2, isometric=K,
        two_block=two_block, three_block=three_block,
        eq22_holds=eq22_holds, eq22_equality=eq22_equality,
        n_sum_invariant=n_sum_invariant, q_pure=q_pure, m_is_full_sum=m_is_full_sum,
        residuals=residuals, flags=flags,
    )
    if not result.invariants_hold:
        failed = [k for k, v in flags.items() if not v]
        logger.warning(f"maximal partial isometric subspace invariants failed: {failed}")
    return result


def _three_block_relations(blocks: BlockDecomposition, tol: Tolerances,
                       residuals: Dict[str, float], flags: Dict[str, bool]) -> None:
    """W0*W0 + W1*W1 = I, W0*R0 + W1*R1 = 0, W0W0* + R0R0* <= I, W1W1* + R1R1* <= I"""
    W0 = blocks.block("H0=N(T)", "H1")
    W1 = blocks.block("H1", "H1")
    R0 = blocks.block("H0=N(T)", "H2")
    R1 = blocks.block("H1", "H2")
    d0, d1 = W0.shape[0], W1.shape[0]
    slack = tol.eq * max(blocks.operator.shape[0], 1)

    residuals["w_columns_isometric"] = op_norm(adjoint(W0) @ W0 + adjoint(W1) @ W1 - np.eye(d1))
    residuals["w_columns_orthogonal_to_r"] = op_norm(adjoint(W0) @ R0 + adjoint(W1) @ R1)
    ok0, defect0 = loewner_leq(hermitian_part(W0 @ adjoint(W0) + R0 @ adjoint(R0)), np.eye(d0), tol)
    ok1, defect1 = loewner_leq(hermitian_part(W1 @ adjoint(W1) + R1 @ adjoint(R1)), np.eye(d1), tol)
    residuals["row_h0_contractive"] = defect0
    residuals["row_h1_contractive"] = defect1
    flags["w_columns_isometric"] = residuals["w_columns_isometric"] <= slack
    flags["w_columns_orthogonal_to_r"] = residuals["w_columns_orthogonal_to_r"] <= slack
    flags["row_h0_contractive"] = ok0
    flags["row_h1_contractive"] = ok1


def three_block_form_23(T: ComplexMatrix, tol: Tolerances) -> BlockDecomposition:
    """Block form on N(T) + N(I - T*T) + H'; the first block column vanishes"""
    T = require_contraction(T, tol)
    n = T.shape[0]
    parts = [kernel(T, tol, scale=1.0), defect_space(T, tol), intermediate_space(T, tol)]
    total = sum(p.rank for p in parts)
    if total > n:
        raise SpanMismatch(f"N(T), N(I - T*T) and H' have total dimension {total} > {n}")
    spanned = direct_sum(*parts, tol=tol)
    residual = complement(spanned, tol)
    if residual.rank:
        raise SpanMismatch(f"N(T), N(I - T*T) and H' leave a residual part of dimension {residual.rank}")
    blocks = block_decomposition(T, parts, ["N(T)", "N(I-T*T)", "H'"], tol)
    first_column = max((op_norm(row[0]) for row in blocks.blocks), default=0.0)
    blocks.residuals["first_column"] = first_column
    blocks.flags["first_column_zero"] = first_column <= tol.eq
    return blocks


def krylov_subspace(T: ComplexMatrix, seed: ComplexMatrix, tol: Tolerances) -> Subspace:
    """Smallest T-invariant subspace containing the columns of `seed`"""
    n = T.shape[0]
    basis = np.zeros((n, 0), dtype=np.complex128)
    frontier = np.atleast_2d(np.asarray(seed, dtype=np.complex128).reshape(n, -1))
    for _ in range(n + 1):
        added = []
        for v in frontier.T:
            for _ in range(2):
                v = v - basis @ (adjoint(basis) @ v)
            norm = np.linalg.norm(v)
            if norm > tol.rank * n * 1e2:
                v = v / norm
                basis = np.column_stack([basis, v])
                added.append(v)
        if not added:
            break
        frontier = T @ np.column_stack(added)
    return Subspace(n, basis)


def maximality_escape(T: ComplexMatrix, result: MaxPartialIsometricResult, rng: np.random.Generator,
                     tol: Tolerances, seeds: int = 20) -> float:
    """
    Sample Krylov subspaces from random seeds in H, in N(T) + N(I - T*T) and in M.

    Returns the largest containment residual in M among those on which T is a
    partial isometry; zero when nothing escapes.
    """
    n = T.shape[0]
    pools: List[Subspace] = [Subspace.full(n)]
    full_sum = direct_sum(result.h0, result.isometric, tol=tol)
    if full_sum.rank:
        pools.append(full_sum)
    if result.m.rank:
        pools.append(result.m)
    worst = 0.0
    for i in range(seeds):
        pool = pools[i % len(pools)]
        coeffs = rng.standard_normal((pool.rank, 1)) + 1j * rng.standard_normal((pool.rank, 1))
        space = krylov_subspace(T, pool.basis @ coeffs, tol)
        if partial_isometry_residual(compress(T, space, space)) <= tol.eq * max(n, 1):
            worst = max(worst, containment_residual(result.m, space))
    return worst


@dataclass(frozen=True)
class AdjointSubspaceReport:
    m: Subspace
    m_star: Subspace
    m_is_full_sum: bool
    mstar_is_full_sum: bool
    adjoint_kernel_invariant: bool
    mstar_in_m: bool
    coisometric_kernel_invariant: bool
    mstar_reduces: bool
    residuals: Dict[str, float]


def adjoint_subspace_report(T: ComplexMatrix, tol: Tolerances) -> AdjointSubspaceReport:
    """
    Compare M for T with M* for T*.

    If M = N(T) + N(I - T*T) and N(T*) lies in N(T) then M* lies in M. If in addition
    N(I - TT*) is T-invariant and M* = N(T*) + N(I - TT*), then M* reduces T to a
    partial isometry.
    """
    T = require_contraction(T, tol)
    n = T.shape[0]
    scale = tol.eq * max(n, 1)
    res = max_partial_isometric_subspace(T, tol)
    res_star = max_partial_isometric_subspace(adjoint(T), tol)
    m, m_star = res.m, res_star.m

    residuals = {
        "adjoint_kernel_in_kernel": containment_residual(res.h0, res_star.h0),
        "mstar_in_m": containment_residual(m, m_star),
        "coisometric_invariance": invariance_residual(T, res_star.isometric),
        "mstar_t_invariance": invariance_residual(T, m_star),
        "mstar_adjoint_invariance": invariance_residual(adjoint(T), m_star),
        "mstar_partial_isometry": partial_isometry_residual(compress(T, m_star, m_star)),
    }
    adjoint_kernel_invariant = residuals["adjoint_kernel_in_kernel"] <= scale
    mstar_in_m = residuals["mstar_in_m"] <= scale
    coisometric_invariant = residuals["coisometric_invariance"] <= scale
    mstar_reduces = (residuals["mstar_t_invariance"] <= scale
                     and residuals["mstar_adjoint_invariance"] <= scale
                     and residuals["mstar_partial_isometry"] <= scale)

    if res.m_is_full_sum and adjoint_kernel_invariant and not mstar_in_m:
        raise TheoremViolation("M* contained in M", residuals["mstar_in_m"])
    if (res.m_is_full_sum and adjoint_kernel_invariant and coisometric_invariant
            and res_star.m_is_full_sum and not mstar_reduces):
        worst = max(residuals["mstar_t_invariance"], residuals["mstar_partial_isometry"])
        raise TheoremViolation("M* reduces T to a partial isometry", worst)

    return AdjointSubspaceReport(
        m=m,
        m_star=m_star,
        m_is_full_sum=res.m_is_full_sum,
        mstar_is_full_sum=res_star.m_is_full_sum,
        adjoint_kernel_invariant=adjoint_kernel_invariant,
        mstar_in_m=mstar_in_m,
        coisometric_kernel_invariant=coisometric_invariant,
        mstar_reduces=mstar_reduces,
        residuals=residuals,
    )
