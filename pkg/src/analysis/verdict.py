"""
Verdict: does T satisfy |T| <= |Re T|, is it self-adjoint, and which structural
results explain the outcome.

Every certificate branch is evaluated whether or not the condition holds, so a
failed condition still shows which result would have applied.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

from src.analysis.decompositions import max_partial_isometric_subspace
from src.analysis.structure import canonical_form_37, form_39_check
from src.linalg.core import ComplexMatrix, op_norm, require_square
from src.operators.classes import ClassMembership, classify
from src.operators.functions import ConditionReport, fong_tsui_check
from src.utils.config import Tolerances
from src.utils.errors import TheoremViolation, ToolkitError

logger = logging.getLogger(__name__)

NEAR_VIOLATION_BAND = 10.0


@dataclass(frozen=True)
class Certificate:
    branch: str
    applies: bool
    residual: float
    note: str = ""


@dataclass
class Verdict:
    condition: ConditionReport
    self_adjoint: bool
    certificates: List[Certificate] = field(default_factory=list)
    classes: Optional[ClassMembership] = None
    zero_operator: bool = False
    near_violation: bool = False
    recheck_defect: Optional[float] = None
    soundness_violation: bool = False

    @property
    def applicable(self) -> List[str]:
        return [c.branch for c in self.certificates if c.applies]


def _certificates(T: ComplexMatrix, cond: ConditionReport, classes: ClassMembership,
                  tol: Tolerances) -> List[Certificate]:
    certs = [
        Certificate("hyponormal", classes.hyponormal.holds, classes.hyponormal.residual),
        Certificate("scaled_partial_isometry", classes.scaled_partial_isometry.holds,
                    classes.scaled_partial_isometry.residual),
    ]
    for m in (1, 2):
        flag = classes.m_quasi_isometry[m]
        certs.append(Certificate(f"contractive_{m}_quasi_isometry",
                                 flag.holds and classes.contraction.holds, flag.residual))

    alpha = op_norm(T)
    try:
        form = canonical_form_37(T, tol)
        certs.append(Certificate("isometric_block_form", form.flags["isometric_block_applies"],
                                 max(form.residuals["s_scaled_isometry"],
                                     0.0 if form.flags["r_injective"] else form.residuals["q_square"])))
        certs.append(Certificate("expansive_block_form", form.flags["expansive_block_applies"],
                                 max(-form.residuals["t_star_t_geq_identity"], form.residuals["s_star_r"])))
    except TheoremViolation:
        raise
    except ToolkitError as e:
        note = f"{type(e).__name__}: {e}"
        certs.append(Certificate("isometric_block_form", False, float("nan"), note))
        certs.append(Certificate("expansive_block_form", False, float("nan"), note))

    certs.append(Certificate("brownian", classes.brownian_sigma is not None,
                             classes.two_isometry.residual, classes.brownian_reason))

    try:
        T0 = T / alpha
        mpi = max_partial_isometric_subspace(T0, tol)
        form39 = form_39_check(T0, mpi.m, tol)
        residual = max(form39.residuals["w_scaled"], form39.residuals["w_prime_scaled"])
        certs.append(Certificate("partial_isometric_diagonal_form", form39.strict_form or form39.scaled_form,
                                 residual))
    except TheoremViolation:
        raise
    except ToolkitError as e:
        certs.append(Certificate("partial_isometric_diagonal_form", False, float("nan"),
                                 f"{type(e).__name__}: {e}"))

    certs.append(Certificate("commutes_with_polar_factor", cond.mortad_commutes, cond.mortad_residual))
    certs.append(Certificate("finite_dimension", True, 0.0))
    return certs


def verdict(T: ComplexMatrix, tol: Tolerances) -> Verdict:
    T = require_square(T)
    cond = fong_tsui_check(T, tol)
    if op_norm(T) == 0.0:
        return Verdict(cond, True, [Certificate("zero_operator", True, 0.0)], zero_operator=True)

    result = Verdict(cond, cond.self_adjoint)
    slack = tol.psd * max(op_norm(T), 1.0)
    defect = cond.fong_tsui_defect
    if -NEAR_VIOLATION_BAND * slack < defect < -slack:
        tight = fong_tsui_check(T, tol.tightened())
        result.near_violation = True
        result.recheck_defect = tight.fong_tsui_defect
        logger.warning(f"defect {defect:.3e} within {NEAR_VIOLATION_BAND:g}x of the slack; "
                       f"tightened recheck gives {tight.fong_tsui_defect:.3e}")

    if cond.fong_tsui_holds and not cond.self_adjoint:
        tight = fong_tsui_check(T, tol.tightened())
        result.recheck_defect = tight.fong_tsui_defect
        if tight.fong_tsui_holds:
            result.soundness_violation = True
            logger.error(f"condition holds at tightened tolerance on a non-self-adjoint operator "
                         f"(asymmetry {cond.asymmetry:.3e})")
        else:
            logger.warning(f"condition holds only within slack (tightened defect {tight.fong_tsui_defect:.3e})")

    classes = classify(T, [1, 2], tol)
    result.classes = classes
    try:
        result.certificates = _certificates(T, cond, classes, tol)
    except TheoremViolation as e:
        logger.error(f"certificate evaluation raised: {e}")
        result.soundness_violation = True
        result.certificates = [Certificate("finite_dimension", True, 0.0, f"TheoremViolation: {e}")]
    return result
