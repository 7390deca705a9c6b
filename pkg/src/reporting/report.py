"""
Analysis reports: a versioned pydantic schema plus rich text rendering

Every float passes through _num() so that NaN/inf become null and the JSON
form parses back into an identical model.
"""

import hashlib
import logging
import math
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict
from rich.console import Console
from rich.table import Table

from src.analysis.blocks import BlockDecomposition
from src.analysis.decompositions import (
    adjoint_subspace_report,
    asymptotic_limit,
    max_partial_isometric_subspace,
    three_block_form_23,
)
from src.analysis.search import SearchResult
from src.analysis.structure import (
    canonical_form_37,
    form_39_check,
    quasi_isometry_structure,
    refined_decomposition_41,
    theorem31_structure,
)
from src.analysis.suites import SuiteReport
from src.analysis.verdict import Verdict, verdict
from src.linalg.core import ComplexMatrix, adjoint, hermitian_eig, hermitian_part, op_norm, require_square
from src.linalg.subspace import direct_sum, distance
from src.operators.classes import ClassFlag, classify
from src.operators.functions import douglas_factor, fong_tsui_check, operator_functions, polar_real_part
from src.utils.config import Tolerances
from src.utils.errors import TheoremViolation, ToolkitError
from src.utils.timing import Stopwatch

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"
PRODUCT_DECIMALS = 12

Pairs = List[List[List[Optional[float]]]]


def _num(x) -> Optional[float]:
    x = float(x)
    return x + 0.0 if math.isfinite(x) else None


def _pairs(A: ComplexMatrix, decimals: Optional[int] = None) -> Pairs:
    A = np.asarray(A, dtype=np.complex128)
    if decimals is not None:
        A = np.round(A, decimals)
    return [[[_num(z.real), _num(z.imag)] for z in row] for row in np.atleast_2d(A)]


def _floats(values: Iterable) -> List[Optional[float]]:
    return [_num(v) for v in values]


def input_digest(T: ComplexMatrix) -> str:
    T = np.ascontiguousarray(T, dtype=np.complex128)
    h = hashlib.sha256()
    h.update(f"{T.shape[0]}x{T.shape[1]}:".encode())
    h.update(T.tobytes())
    return f"sha256:{h.hexdigest()}"


class Schema(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class Flag(Schema):
    holds: bool
    residual: Optional[float]


class BlockSummary(Schema):
    labels: List[str]
    dims: List[int]
    block_norms: List[List[Optional[float]]]
    reconstruction_residual: Optional[float]


class FunctionsSummary(Schema):
    norm: Optional[float]
    singular_values: List[Optional[float]]
    real_part_eigenvalues: List[Optional[float]]


class ConditionSummary(Schema):
    fong_tsui: Flag                     # residual = defect, min eig of |Re T| - |T|
    fong_istratescu: Flag               # residual = defect, min eig of (Re T)^2 - T*T
    self_adjoint: Flag                  # residual = asymmetry
    commutes_with_polar_factor: Flag
    violated_direction: Pairs


class DouglasSummary(Schema):
    norm_a: Optional[float]
    range_condition: Flag
    is_contraction: Flag
    real_square_contraction: Flag
    modulus_square_bound: Flag


class PolarSummary(Schema):
    fixed_points_match: bool
    u_tilde: Pairs
    t_u: Pairs
    u_t: Pairs


class ClassSummary(Schema):
    flags: Dict[str, Flag]
    nilpotent_order: Optional[int]
    brownian_sigma: Optional[float]
    brownian_reason: str


class MaxPartialIsometricSummary(Schema):
    normalized_by: Optional[float]      # set when the summary is of T / ||T||
    dims: Dict[str, int]
    two_block: BlockSummary
    three_block: BlockSummary
    flags: Dict[str, Flag]


class Theorem31Summary(Schema):
    normalized_by: Optional[float]
    condition_holds: bool
    kernel_dims: Dict[str, int]
    kernels_equal: Dict[str, Flag]
    re_kernel_identity: bool
    n_tstar_split: bool
    diag_split: bool
    boundary: bool
    residuals: Dict[str, Optional[float]]


class CertificateSummary(Schema):
    branch: str
    applies: bool
    residual: Optional[float]
    note: str


class VerdictSummary(Schema):
    condition_holds: bool
    self_adjoint: bool
    applicable: List[str]
    certificates: List[CertificateSummary]
    zero_operator: bool
    near_violation: bool
    recheck_defect: Optional[float]
    soundness_violation: bool


class InputSummary(Schema):
    digest: str
    rows: int
    cols: int


class AnalysisReport(Schema):
    schema_version: str = SCHEMA_VERSION
    input: InputSummary
    tolerances: Dict[str, float]
    functions: FunctionsSummary
    condition: ConditionSummary
    douglas: DouglasSummary
    polar: PolarSummary
    classes: ClassSummary
    max_partial_isometric: Optional[MaxPartialIsometricSummary] = None
    theorem31: Optional[Theorem31Summary] = None
    verdict: VerdictSummary
    notes: List[str] = []
    timings: Optional[Dict[str, float]] = None

    def to_json(self) -> str:
        return self.model_dump_json(indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        return cls.model_validate_json(text)


class SuiteSummary(Schema):
    schema_version: str = SCHEMA_VERSION
    suite: str
    seed: int
    dims: List[int]
    trials: int
    passes: int
    failures: int
    worst_residuals: Dict[str, Optional[float]]
    failing_seeds: List[int]
    records: List[Dict[str, Any]] = []
    timings: Optional[Dict[str, float]] = None


class SearchRun(Schema):
    dim: int
    delta: float
    best_defect: Optional[float]
    best_asymmetry: Optional[float]
    evaluations: int
    trace: List[Optional[float]]
    incumbent: Pairs
    reaches_condition: bool


class SearchSummary(Schema):
    schema_version: str = SCHEMA_VERSION
    seed: int
    restarts: int
    iters_per_restart: int
    runs: List[SearchRun]
    timings: Optional[Dict[str, float]] = None


def _flag(f: ClassFlag) -> Flag:
    return Flag(holds=bool(f.holds), residual=_num(f.residual))


def block_summary(blocks: BlockDecomposition) -> BlockSummary:
    return BlockSummary(
        labels=list(blocks.labels),
        dims=blocks.dims,
        block_norms=[_floats(row) for row in blocks.block_norms()],
        reconstruction_residual=_num(blocks.reconstruction_residual()),
    )


def verdict_summary(v: Verdict) -> VerdictSummary:
    return VerdictSummary(
        condition_holds=bool(v.condition.fong_tsui_holds),
        self_adjoint=bool(v.self_adjoint),
        applicable=v.applicable,
        certificates=[CertificateSummary(branch=c.branch, applies=bool(c.applies),
                                         residual=_num(c.residual), note=c.note)
                      for c in v.certificates],
        zero_operator=v.zero_operator,
        near_violation=v.near_violation,
        recheck_defect=None if v.recheck_defect is None else _num(v.recheck_defect),
        soundness_violation=v.soundness_violation,
    )


def _max_pi_summary(T0: ComplexMatrix, normalized_by: Optional[float], tol: Tolerances) -> MaxPartialIsometricSummary:
    mpi = max_partial_isometric_subspace(T0, tol)
    r = mpi.residuals
    flags = {name: Flag(holds=bool(holds), residual=_num(r[name])) for name, holds in mpi.flags.items()}
    flags["eq22_holds"] = Flag(holds=bool(mpi.eq22_holds), residual=_num(r["eq22_criterion"]))
    flags["eq22_equality"] = Flag(holds=bool(mpi.eq22_equality), residual=_num(r["eq22_distance"]))
    flags["n_sum_invariant"] = Flag(holds=bool(mpi.n_sum_invariant), residual=_num(r["n_sum_invariance"]))
    flags["q_pure"] = Flag(holds=bool(mpi.q_pure), residual=_num(op_norm(mpi.q)) if mpi.q.size else 0.0)
    full_sum = direct_sum(mpi.h0, mpi.isometric, tol=tol)
    flags["m_is_full_sum"] = Flag(holds=bool(mpi.m_is_full_sum), residual=_num(distance(mpi.m, full_sum)))
    return MaxPartialIsometricSummary(
        normalized_by=normalized_by,
        dims={"M": mpi.m.rank, "N(T)": mpi.h0.rank, "H1": mpi.h1.rank, "M_perp": mpi.h2.rank,
              "N(I-T*T)": mpi.isometric.rank},
        two_block=block_summary(mpi.two_block),
        three_block=block_summary(mpi.three_block),
        flags=flags,
    )


def _theorem31_summary(T0: ComplexMatrix, normalized_by: Optional[float], tol: Tolerances) -> Theorem31Summary:
    rep = theorem31_structure(T0, tol)
    return Theorem31Summary(
        normalized_by=normalized_by,
        condition_holds=bool(rep.condition_holds),
        kernel_dims={k: v.rank for k, v in rep.kernels.items()},
        kernels_equal={k: Flag(holds=bool(rep.kernels_equal[k]), residual=_num(d))
                       for k, d in rep.kernel_distances.items()},
        re_kernel_identity=bool(rep.re_kernel_identity),
        n_tstar_split=bool(rep.n_tstar_split),
        diag_split=bool(rep.diag_split),
        boundary=bool(rep.boundary),
        residuals={k: _num(v) for k, v in rep.residuals.items()},
    )


def analyze(T: ComplexMatrix, tol: Tolerances, m_list: Iterable[int] = (1, 2),
            timings: bool = False) -> AnalysisReport:
    """
    Full report for one operator.

    The contraction-only parts (maximal partial isometric subspace and the
    three-kernel structure) are computed on T / ||T|| when ||T|| > 1; the
    condition is invariant under positive scaling.
    """
    T = require_square(T)
    watch = Stopwatch()
    notes: List[str] = []

    funcs = operator_functions(T, tol)
    cond = fong_tsui_check(T, tol)
    factor = douglas_factor(T, tol)
    polar = polar_real_part(T, tol)
    U = polar.u_tilde
    watch.lap("operator_functions")

    classes = classify(T, m_list, tol)
    class_flags = {
        name: _flag(getattr(classes, name))
        for name in ("contraction", "pure_contraction", "isometry", "unitary", "symmetry", "partial_isometry",
                     "scaled_partial_isometry", "hyponormal", "normal", "self_adjoint", "two_isometry")
    }
    for m, flag in classes.m_quasi_isometry.items():
        class_flags[f"{m}_quasi_isometry"] = _flag(flag)
    watch.lap("classify")

    norm = funcs.norm
    if norm > 1.0 + tol.psd:
        T0, normalized_by = T / norm, _num(norm)
        notes.append(f"structure summaries computed on T / ||T|| (||T|| = {norm:.12g})")
    else:
        T0, normalized_by = T, None
    max_pi = thm31 = None
    try:
        max_pi = _max_pi_summary(T0, normalized_by, tol)
    except TheoremViolation:
        raise
    except ToolkitError as e:
        notes.append(f"maximal partial isometric subspace unavailable: {type(e).__name__}: {e}")
    watch.lap("max_partial_isometric")
    try:
        thm31 = _theorem31_summary(T0, normalized_by, tol)
    except TheoremViolation:
        raise
    except ToolkitError as e:
        notes.append(f"kernel structure unavailable: {type(e).__name__}: {e}")
    watch.lap("theorem31")

    v = verdict(T, tol)
    watch.lap("verdict")
    if v.soundness_violation:
        notes.append("condition holds on a non-self-adjoint operator at tightened tolerance")

    n = T.shape[0]
    report = AnalysisReport(
        input=InputSummary(digest=input_digest(T), rows=n, cols=n),
        tolerances={k: float(v_) for k, v_ in tol.model_dump().items()},
        functions=FunctionsSummary(
            norm=_num(funcs.norm),
            singular_values=_floats(funcs.singular_values),
            real_part_eigenvalues=_floats(funcs.real_part_eigenvalues),
        ),
        condition=ConditionSummary(
            fong_tsui=Flag(holds=bool(cond.fong_tsui_holds), residual=_num(cond.fong_tsui_defect)),
            fong_istratescu=Flag(holds=bool(cond.fong_istratescu_holds), residual=_num(cond.fong_istratescu_defect)),
            self_adjoint=Flag(holds=bool(cond.self_adjoint), residual=_num(cond.asymmetry)),
            commutes_with_polar_factor=Flag(holds=bool(cond.mortad_commutes), residual=_num(cond.mortad_residual)),
            violated_direction=_pairs(np.asarray(cond.violated_direction).reshape(1, -1), PRODUCT_DECIMALS),
        ),
        douglas=DouglasSummary(
            norm_a=_num(factor.norm_a),
            range_condition=Flag(holds=bool(factor.range_condition), residual=_num(factor.residual)),
            is_contraction=Flag(holds=bool(factor.is_contraction), residual=_num(factor.norm_a)),
            real_square_contraction=Flag(holds=bool(factor.real_square_contraction),
                                         residual=_num(factor.real_square_defect)),
            modulus_square_bound=Flag(holds=bool(factor.modulus_square_bound),
                                      residual=_num(factor.modulus_square_defect)),
        ),
        polar=PolarSummary(
            fixed_points_match=bool(polar.fixed_points_match),
            u_tilde=_pairs(U, PRODUCT_DECIMALS),
            t_u=_pairs(T @ U, PRODUCT_DECIMALS),
            u_t=_pairs(U @ T, PRODUCT_DECIMALS),
        ),
        classes=ClassSummary(
            flags=class_flags,
            nilpotent_order=classes.nilpotent_order,
            brownian_sigma=None if classes.brownian_sigma is None else _num(classes.brownian_sigma),
            brownian_reason=classes.brownian_reason,
        ),
        max_partial_isometric=max_pi,
        theorem31=thm31,
        verdict=verdict_summary(v),
        notes=notes,
        timings=dict(watch.laps) if timings else None,
    )
    logger.info(f"Analyzed {n}x{n} operator: condition {cond.fong_tsui_holds}, "
                f"defect {cond.fong_tsui_defect:.3e}, self-adjoint {cond.self_adjoint}")
    return report


def suite_summary(report: SuiteReport, seed: int, dims: List[int],
                  timings: Optional[Dict[str, float]] = None) -> SuiteSummary:
    records = [{k: (_num(v) if isinstance(v, (float, np.floating)) else
                    bool(v) if isinstance(v, np.bool_) else v) for k, v in rec.items()}
               for rec in report.records]
    return SuiteSummary(
        suite=report.suite,
        seed=seed,
        dims=list(dims),
        trials=report.trials,
        passes=report.passes,
        failures=report.failures,
        worst_residuals={k: _num(v) for k, v in report.worst_residuals.items()},
        failing_seeds=list(report.failing_seeds),
        records=records,
        timings=timings,
    )


def search_run(result: SearchResult, tol: Tolerances) -> SearchRun:
    return SearchRun(
        dim=result.dim,
        delta=result.delta,
        best_defect=_num(result.best_defect),
        best_asymmetry=_num(result.best_asymmetry),
        evaluations=result.evaluations,
        trace=_floats(result.trace),
        incumbent=_pairs(result.incumbent),
        reaches_condition=bool(result.best_defect >= -tol.psd and result.best_asymmetry >= result.delta),
    )


class DecompositionSummary(Schema):
    schema_version: str = SCHEMA_VERSION
    which: str
    input: InputSummary
    dims: Dict[str, int]
    blocks: Dict[str, BlockSummary]
    flags: Dict[str, bool]
    residuals: Dict[str, Optional[float]]
    values: Dict[str, Any] = {}
    boundary: bool = False
    invariants_hold: bool = True


def _residuals(values: Dict[str, float]) -> Dict[str, Optional[float]]:
    return {k: _num(v) for k, v in values.items()}


def _decompose_max_pi(T, tol, m_list):
    mpi = max_partial_isometric_subspace(T, tol)
    flags = dict(mpi.flags)
    flags.update(eq22_holds=mpi.eq22_holds, eq22_equality=mpi.eq22_equality,
                 n_sum_invariant=mpi.n_sum_invariant, q_pure=mpi.q_pure, m_is_full_sum=mpi.m_is_full_sum)
    return dict(
        dims={"M": mpi.m.rank, "N(T)": mpi.h0.rank, "H1": mpi.h1.rank, "M_perp": mpi.h2.rank,
              "N(I-T*T)": mpi.isometric.rank},
        blocks={"two_block": block_summary(mpi.two_block), "three_block": block_summary(mpi.three_block)},
        flags=flags, residuals=_residuals(mpi.residuals), invariants_hold=mpi.invariants_hold,
    )


def _decompose_asymptotic(T, tol, m_list):
    limit = asymptotic_limit(T, tol)
    S = limit.s_t
    fixed = op_norm(adjoint(T) @ S @ T - S)
    return dict(
        dims={"N(I-S_T)": limit.max_isometric.rank},
        blocks={}, flags={"fixed_point": fixed <= tol.eq * max(T.shape[0], 1)},
        residuals={"fixed_point": _num(fixed)},
        values={"iterations": limit.iterations, "power": limit.power,
                "s_t_eigenvalues": _floats(hermitian_eig(hermitian_part(S), tol).eigenvalues)},
    )


def _decompose_thm31(T, tol, m_list):
    rep = theorem31_structure(T, tol)
    flags = {f"kernel {k}": v for k, v in rep.kernels_equal.items()}
    flags.update(condition_holds=rep.condition_holds, re_kernel_identity=rep.re_kernel_identity,
                 n_tstar_split=rep.n_tstar_split, diag_split=rep.diag_split)
    residuals = {f"kernel {k}": v for k, v in rep.kernel_distances.items()}
    residuals.update(rep.residuals)
    blocks = {"split_form": block_summary(rep.split_form)} if rep.split_form is not None else {}
    return dict(dims={k: v.rank for k, v in rep.kernels.items()}, blocks=blocks, flags=flags,
                residuals=_residuals(residuals), boundary=rep.boundary)


def _decompose_form37(T, tol, m_list):
    form = canonical_form_37(T, tol)
    return dict(dims={"G": form.g.rank, "G_perp": T.shape[0] - form.g.rank},
                blocks={"form_37": block_summary(form.blocks)},
                flags={"condition_holds": form.condition_holds, **form.flags},
                residuals=_residuals(form.residuals), boundary=form.boundary,
                values={"alpha": _num(form.alpha), "iterations": form.iterations})


def _decompose_rmk41(T, tol, m_list):
    rep = refined_decomposition_41(T, tol)
    return dict(dims=dict(zip(rep.blocks.labels, rep.blocks.dims)),
                blocks={"refined": block_summary(rep.blocks), "adjoint": block_summary(rep.adjoint_form)},
                flags={"kernels_equal": rep.kernels_equal}, residuals=_residuals(rep.residuals),
                boundary=rep.boundary)


def _decompose_blocks23(T, tol, m_list):
    blocks = three_block_form_23(T, tol)
    return dict(dims=dict(zip(blocks.labels, blocks.dims)), blocks={"form_23": block_summary(blocks)},
                flags=dict(blocks.flags), residuals=_residuals(blocks.residuals),
                invariants_hold=all(blocks.flags.values()))


def _decompose_adjoint(T, tol, m_list):
    rep = adjoint_subspace_report(T, tol)
    return dict(dims={"M": rep.m.rank, "M*": rep.m_star.rank}, blocks={},
                flags={"m_is_full_sum": rep.m_is_full_sum, "mstar_is_full_sum": rep.mstar_is_full_sum,
                       "adjoint_kernel_invariant": rep.adjoint_kernel_invariant, "mstar_in_m": rep.mstar_in_m,
                       "coisometric_kernel_invariant": rep.coisometric_kernel_invariant,
                       "mstar_reduces": rep.mstar_reduces},
                residuals=_residuals(rep.residuals))


def _decompose_quasi(T, tol, m_list):
    m = max(m_list)
    rep = quasi_isometry_structure(T, m, tol)
    return dict(dims=dict(zip(rep.blocks.labels, rep.blocks.dims)), blocks={"quasi": block_summary(rep.blocks)},
                flags={"condition_holds": rep.condition_holds, "self_adjoint": rep.self_adjoint, **rep.flags},
                residuals=_residuals(rep.residuals), boundary=rep.boundary, values={"m": m})


def _decompose_form39(T, tol, m_list):
    mpi = max_partial_isometric_subspace(T, tol)
    rep = form_39_check(T, mpi.m, tol)
    return dict(dims=dict(zip(rep.blocks.labels, rep.blocks.dims)), blocks={"form_39": block_summary(rep.blocks)},
                flags={"strict_form": rep.strict_form, "scaled_form": rep.scaled_form,
                       "condition_holds": rep.condition_holds, "self_adjoint": rep.self_adjoint},
                residuals=_residuals(rep.residuals), boundary=rep.boundary)


DECOMPOSITIONS = {
    "max-pi": _decompose_max_pi,
    "asymptotic": _decompose_asymptotic,
    "thm31": _decompose_thm31,
    "form37": _decompose_form37,
    "rmk41": _decompose_rmk41,
    "blocks23": _decompose_blocks23,
    "adjoint": _decompose_adjoint,
    "quasi": _decompose_quasi,
    "form39": _decompose_form39,
}


def decompose(T: ComplexMatrix, which: str, tol: Tolerances, m_list: Iterable[int] = (1, 2)) -> DecompositionSummary:
    if which not in DECOMPOSITIONS:
        raise ValueError(f"unknown decomposition '{which}'; known: {', '.join(DECOMPOSITIONS)}")
    T = require_square(T)
    parts = DECOMPOSITIONS[which](T, tol, list(m_list))
    parts["flags"] = {k: bool(v) for k, v in parts["flags"].items()}
    return DecompositionSummary(which=which, input=InputSummary(digest=input_digest(T), rows=T.shape[0],
                                                                cols=T.shape[1]), **parts)


# ========== Text rendering ==========

def _fmt(x: Optional[float]) -> str:
    return "n/a" if x is None else f"{x:.6g}"


def _mark(holds: bool) -> str:
    return "[green]yes[/green]" if holds else "[red]no[/red]"


def _flag_table(title: str, flags: Dict[str, Flag]) -> Table:
    table = Table(title=title, title_justify="left")
    table.add_column("property")
    table.add_column("holds")
    table.add_column("residual", justify="right")
    for name, flag in flags.items():
        table.add_row(name, _mark(flag.holds), _fmt(flag.residual))
    return table


def _matrix_text(pairs: Pairs) -> str:
    rows = []
    for row in pairs:
        cells = []
        for re, im in row:
            z = complex(re or 0.0, im or 0.0)
            cells.append(f"{z.real:g}" if z.imag == 0 else f"{z.real:g}{z.imag:+g}i")
        rows.append("[" + ", ".join(cells) + "]")
    return "\n".join(rows)


def _block_table(title: str, blocks: BlockSummary) -> Table:
    table = Table(title=title, title_justify="left")
    table.add_column("||block||")
    for label, dim in zip(blocks.labels, blocks.dims):
        table.add_column(f"{label} ({dim})", justify="right")
    for label, row in zip(blocks.labels, blocks.block_norms):
        table.add_row(label, *[_fmt(x) for x in row])
    return table


def render_analysis(report: AnalysisReport, console: Console) -> None:
    c = report.condition
    console.print(f"[bold]Operator[/bold] {report.input.rows}x{report.input.cols}  {report.input.digest}")
    console.print(f"||T|| = {_fmt(report.functions.norm)}")
    console.print(f"singular values: {', '.join(_fmt(x) for x in report.functions.singular_values)}")
    console.print(f"Re T eigenvalues: {', '.join(_fmt(x) for x in report.functions.real_part_eigenvalues)}")
    console.print()

    console.print(_flag_table("Condition", {
        "fong_tsui_holds (defect)": c.fong_tsui,
        "fong_istratescu_holds (defect)": c.fong_istratescu,
        "self_adjoint (asymmetry)": c.self_adjoint,
        "commutes_with_polar_factor": c.commutes_with_polar_factor,
        "douglas range condition": report.douglas.range_condition,
        "douglas factor contraction (||A||)": report.douglas.is_contraction,
        "A |ReT|^2 A* <= |ReT|^2": report.douglas.real_square_contraction,
        "|T|^2 <= A |ReT|^2 A*": report.douglas.modulus_square_bound,
    }))
    console.print(f"[bold]T U~[/bold] (rounded to {PRODUCT_DECIMALS} decimals)")
    console.print(_matrix_text(report.polar.t_u), markup=False)
    console.print(f"[bold]U~ T[/bold] (rounded to {PRODUCT_DECIMALS} decimals)")
    console.print(_matrix_text(report.polar.u_t), markup=False)
    console.print(f"N(I - |Re T|) = N(U~ - Re T): {_mark(report.polar.fixed_points_match)}")
    console.print()

    console.print(_flag_table("Classes", report.classes.flags))
    console.print(f"nilpotent order: {report.classes.nilpotent_order if report.classes.nilpotent_order else 'n/a'}")
    console.print(f"brownian: {report.classes.brownian_reason}", markup=False)
    console.print()

    if report.max_partial_isometric is not None:
        mpi = report.max_partial_isometric
        dims = ", ".join(f"{k}={v}" for k, v in mpi.dims.items())
        console.print(f"[bold]Maximal partial isometric subspace[/bold]  {dims}")
        console.print(_block_table("M + M_perp", mpi.two_block))
        console.print(_flag_table("Invariants", mpi.flags))
        console.print()
    if report.theorem31 is not None:
        t = report.theorem31
        console.print(_flag_table("Kernel equalities", t.kernels_equal))
        console.print(f"N(Re T) = N(T) meet N(T*): {_mark(t.re_kernel_identity)}   "
                      f"N(T*) split: {_mark(t.n_tstar_split)}   N(T) = N(Re T): {_mark(t.diag_split)}")
        console.print()

    v = report.verdict
    table = Table(title="Verdict", title_justify="left")
    table.add_column("branch")
    table.add_column("applies")
    table.add_column("residual", justify="right")
    table.add_column("note")
    for cert in v.certificates:
        table.add_row(cert.branch, _mark(cert.applies), _fmt(cert.residual), cert.note)
    console.print(table)
    status = "[green]holds[/green]" if v.condition_holds else "[red]fails[/red]"
    console.print(f"|T| <= |Re T| {status}; self-adjoint {_mark(v.self_adjoint)}")
    if v.near_violation:
        console.print(f"[yellow]near violation[/yellow]: tightened defect {_fmt(v.recheck_defect)}")
    if v.soundness_violation:
        console.print("[bold red]SOUNDNESS VIOLATION[/bold red]")
    for note in report.notes:
        console.print(f"note: {note}", markup=False)
    if report.timings:
        console.print("timings: " + ", ".join(f"{k}={s:.3f}s" for k, s in report.timings.items()))


def render_suite(summary: SuiteSummary, console: Console) -> None:
    status = "[green]PASS[/green]" if summary.failures == 0 else "[red]FAIL[/red]"
    console.print(f"{status} suite {summary.suite}: {summary.passes}/{summary.trials} passed "
                  f"(dims {summary.dims[0]}..{summary.dims[-1]}, seed {summary.seed})")
    if summary.worst_residuals:
        table = Table(title="Worst residuals", title_justify="left")
        table.add_column("residual")
        table.add_column("worst", justify="right")
        for key, value in summary.worst_residuals.items():
            table.add_row(key, _fmt(value))
        console.print(table)
    if summary.failing_seeds:
        console.print(f"failing seeds: {', '.join(str(s) for s in summary.failing_seeds)}")
    if summary.records:
        console.print(f"{len(summary.records)} records (use --format json for the full list)")
    if summary.timings:
        console.print("timings: " + ", ".join(f"{k}={s:.3f}s" for k, s in summary.timings.items()))


def render_search(summary: SearchSummary, console: Console) -> None:
    table = Table(title=f"Counterexample search (seed {summary.seed}, {summary.restarts} restarts)",
                  title_justify="left")
    table.add_column("dim", justify="right")
    table.add_column("delta", justify="right")
    table.add_column("best defect", justify="right")
    table.add_column("asymmetry", justify="right")
    table.add_column("evaluations", justify="right")
    table.add_column("reaches condition")
    for run in summary.runs:
        table.add_row(str(run.dim), _fmt(run.delta), _fmt(run.best_defect), _fmt(run.best_asymmetry),
                      str(run.evaluations), _mark(run.reaches_condition))
    console.print(table)
    if summary.timings:
        console.print("timings: " + ", ".join(f"{k}={s:.3f}s" for k, s in summary.timings.items()))


def render_decomposition(summary: DecompositionSummary, console: Console) -> None:
    dims = ", ".join(f"{k}={v}" for k, v in summary.dims.items())
    console.print(f"[bold]{summary.which}[/bold] on {summary.input.rows}x{summary.input.cols}  {dims}")
    for name, blocks in summary.blocks.items():
        console.print(_block_table(name, blocks))
    flags = {k: Flag(holds=v, residual=summary.residuals.get(k)) for k, v in summary.flags.items()}
    console.print(_flag_table("Flags", flags))
    extra = {k: v for k, v in summary.residuals.items() if k not in summary.flags}
    if extra:
        table = Table(title="Residuals", title_justify="left")
        table.add_column("residual")
        table.add_column("value", justify="right")
        for key, value in extra.items():
            table.add_row(key, _fmt(value))
        console.print(table)
    for key, value in summary.values.items():
        console.print(f"{key}: {value}", markup=False)
    if summary.boundary:
        console.print("[yellow]boundary[/yellow]: an assertion held only at tightened tolerance")
