"""
Seeded property suites over generated operator corpora.

Trial t of a run with seed s uses generator seed s * 100000 + t and dimension
dims[t % len(dims)]; the generator kind cycles through the suite's corpus.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.analysis.decompositions import (
    asymptotic_limit,
    defect_space,
    max_partial_isometric_subspace,
    maximality_escape,
)
from src.analysis.structure import canonical_form_37, quasi_isometry_structure, theorem31_structure
from src.analysis.verdict import verdict
from src.data.generators import ClassSpec, GeneratorKind, generate, paper_example_41, stream
from src.linalg.core import adjoint, fro, loewner_leq, op_norm
from src.linalg.subspace import containment_residual
from src.operators.classes import brownian_decompose, two_isometry_structure
from src.operators.functions import douglas_factor, fong_tsui_check, polar_real_part
from src.utils.concurrency import run_sharded
from src.utils.config import Tolerances
from src.utils.errors import NotTwoIsometry, SigmaZero, TheoremViolation, ToolkitError, UnknownSuite

logger = logging.getLogger(__name__)

SEED_STRIDE = 100000
PROPERTY_TOL = 1e-8

K = GeneratorKind
CONTRACTION_CORPUS: Tuple[Tuple[GeneratorKind, dict], ...] = (
    (K.CONTRACTION, {}),
    (K.PURE_CONTRACTION, {}),
    (K.PARTIAL_ISOMETRY, {}),
    (K.NILPOTENT, {}),
    (K.M_QUASI_ISOMETRY, {"m": 2}),
    (K.SYMMETRY_PLUS_ZERO, {}),
    (K.SELF_ADJOINT_CONTRACTION, {}),
    (K.NORMAL, {}),
    (K.UNITARY, {}),
    (K.SYMMETRY, {}),
)
SATISFIER_CORPUS = (
    (K.SELF_ADJOINT_CONTRACTION, {}),
    (K.SYMMETRY, {}),
    (K.SYMMETRY_PLUS_ZERO, {}),
    (K.CONTRACTION, {}),
    (K.SELF_ADJOINT_CONTRACTION, {}),
    (K.SYMMETRY_PLUS_ZERO, {}),
    (K.PARTIAL_ISOMETRY, {}),
    (K.SELF_ADJOINT_CONTRACTION, {}),
    (K.NILPOTENT, {}),
    (K.HERMITIAN_PLUS_PERTURBATION, {"epsilon": 0.05}),
)
ORACLE_CORPUS = (
    (K.SELF_ADJOINT_CONTRACTION, {}),
    (K.HERMITIAN_PLUS_PERTURBATION, {"epsilon": 1e-2}),
    (K.CONTRACTION, {}),
    (K.SYMMETRY, {}),
    (K.HERMITIAN_PLUS_PERTURBATION, {"epsilon": 1e-1}),
    (K.NORMAL, {}),
    (K.NILPOTENT, {}),
)
SOUNDNESS_CORPUS = CONTRACTION_CORPUS + ((K.HERMITIAN_PLUS_PERTURBATION, {"epsilon": 1e-2}),)
FUZZ_CORPUS = ((K.CONTRACTION, {}), (K.PURE_CONTRACTION, {}))


@dataclass
class TrialOutcome:
    seed: int
    dim: int
    kind: str
    passed: bool
    residuals: Dict[str, float] = field(default_factory=dict)
    record: Dict[str, object] = field(default_factory=dict)
    note: str = ""


@dataclass
class SuiteReport:
    suite: str
    trials: int
    passes: int
    failures: int
    worst_residuals: Dict[str, float] = field(default_factory=dict)
    failing_seeds: List[int] = field(default_factory=list)
    records: List[Dict[str, object]] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return self.failures == 0


def _spec(corpus, trial: int, dim: int, seed: int, **extra) -> ClassSpec:
    kind, params = corpus[trial % len(corpus)]
    return ClassSpec(kind=kind, dim=dim, seed=seed, **{**params, **extra})


def _ok(residuals: Dict[str, float], bound: float = PROPERTY_TOL) -> bool:
    return all(v <= bound for v in residuals.values())


def _trial_thm21(trial, dim, seed, tol):
    T = generate(_spec(CONTRACTION_CORPUS, trial, dim, seed), tol)
    result = max_partial_isometric_subspace(T, tol)
    residuals = {k: result.residuals[k] for k in (
        "sandwich_lower", "sandwich_upper", "invariance", "w_partial_isometry",
        "w_star_r", "q_isometric_inside_t_isometric", "w_columns_isometric", "w_columns_orthogonal_to_r")}
    residuals["maximality_escape"] = maximality_escape(T, result, stream(seed, 1), tol)
    passed = _ok(residuals) and result.invariants_hold
    note = ""
    if result.n_sum_invariant != result.q_pure:
        passed, note = False, "invariance of N(T) + N(I - T*T) disagrees with purity of Q"
    if result.eq22_holds != result.eq22_equality:
        passed, note = False, "kernel criterion disagrees with the direct subspace equality"
    return passed, residuals, note


def _trial_cor22(trial, dim, seed, tol):
    T = generate(_spec(CONTRACTION_CORPUS, trial, dim, seed), tol)
    result = max_partial_isometric_subspace(T, tol)
    passed = result.n_sum_invariant == result.q_pure
    return passed, {"n_sum_invariance": result.residuals["n_sum_invariance"]}, "" if passed else "biconditional fails"


def _trial_thm31(trial, dim, seed, tol):
    T = generate(_spec(SATISFIER_CORPUS, trial, dim, seed), tol)
    report = theorem31_structure(T, tol)
    residuals: Dict[str, float] = {}
    if report.condition_holds and not report.boundary:
        residuals = {k: report.residuals[k] for k in (
            "symmetry_hermitian", "symmetry_square", "re_kernel_identity", "n_tstar_split")}
        residuals.update({f"kernel {k}": v for k, v in report.kernel_distances.items()})
    return _ok(residuals), residuals, "condition holds" if report.condition_holds else ""


def _trial_cor35(trial, dim, seed, tol):
    m = 3 + trial % 2
    corpus = ((K.M_QUASI_ISOMETRY, {"m": m}), (K.SYMMETRY_PLUS_ZERO, {}))
    T = generate(_spec(corpus, trial // 2, dim, seed), tol)
    result = quasi_isometry_structure(T, m, tol)
    scale = max(op_norm(T), 1.0)
    residuals = {"reassembly": result.residuals["reassembly"] / scale, "q_power": result.residuals["q_power"]}
    if result.condition_holds and not result.boundary:
        for key in ("defect_space_is_top", "coisometric_space_is_top", "s_symmetry", "r_vanishes"):
            residuals[key] = result.residuals[key]
    return _ok(residuals), residuals, f"m={m}"


def _trial_rmk23(trial, dim, seed, tol):
    T = generate(_spec(CONTRACTION_CORPUS, trial, dim, seed), tol)
    limit = asymptotic_limit(T, tol)
    S = limit.s_t
    n = T.shape[0]
    lower, d_lower = loewner_leq(np.zeros((n, n)), S, tol)
    upper, d_upper = loewner_leq(S, np.eye(n), tol)
    mpi = max_partial_isometric_subspace(T, tol)
    residuals = {
        "hermitian": fro(S - adjoint(S)),
        "fixed_point": op_norm(adjoint(T) @ S @ T - S),
        "inside_m": containment_residual(mpi.m, limit.max_isometric),
        "inside_isometric": containment_residual(defect_space(T, tol), limit.max_isometric),
    }
    passed = lower and upper and _ok(residuals, 1e-9 * max(n, 1))
    return passed, residuals, f"power {limit.power}"


def _trial_oracle10(trial, dim, seed, tol):
    T = generate(_spec(ORACLE_CORPUS, trial, dim, seed), tol)
    cond = fong_tsui_check(T, tol)
    hermitian = fro(T - adjoint(T)) <= 1e-8 * fro(T)
    passed = cond.fong_istratescu_holds == hermitian
    return passed, {}, "" if passed else f"oracle {cond.fong_istratescu_holds}, hermitian {hermitian}"


def _trial_findim11(trial, dim, seed, tol):
    T = generate(_spec(SOUNDNESS_CORPUS, trial, dim, seed), tol)
    v = verdict(T, tol)
    passed = not v.soundness_violation
    return passed, {"defect": max(v.condition.fong_tsui_defect, 0.0)}, "" if passed else "soundness violation"


def _trial_fuzz(trial, dim, seed, tol):
    T = generate(_spec(FUZZ_CORPUS, trial, dim, seed), tol)
    v = verdict(T, tol)
    passed = not v.soundness_violation
    record = {"defect": v.condition.fong_tsui_defect, "asymmetry": v.condition.asymmetry} if not passed else {}
    return passed, {"defect": max(v.condition.fong_tsui_defect, 0.0)}, "" if passed else "soundness violation", record


def _trial_polar41(trial, dim, seed, tol):
    h = dim
    T, U = paper_example_41(h)
    I = np.eye(h, dtype=np.int64)
    Z = np.zeros((h, h), dtype=np.int64)
    tu_ok = np.array_equal(T @ U, np.block([[I, Z], [Z, Z]]))
    ut_ok = np.array_equal(U @ T, np.block([[Z, Z], [Z, I]]))
    symmetry_ok = np.array_equal(U, U.T) and np.array_equal(U @ U, np.eye(2 * h, dtype=np.int64))
    polar = polar_real_part(T.astype(np.complex128), tol)
    residuals = {"polar_factor": op_norm(polar.u_tilde - U)}
    passed = tu_ok and ut_ok and symmetry_ok and _ok(residuals, 1e-12)
    return passed, residuals, f"half_dim {h}"


def _trial_douglas42(trial, dim, seed, tol):
    T = generate(_spec(SOUNDNESS_CORPUS, trial, dim, seed), tol)
    cond = fong_tsui_check(T, tol)
    factor = douglas_factor(T, tol)
    scale = max(op_norm(T), 1.0)
    douglas_ok = factor.residual <= PROPERTY_TOL * scale and factor.norm_a <= 1.0 + 1e-9
    passed = douglas_ok == cond.fong_tsui_holds
    return passed, {}, "" if passed else f"condition {cond.fong_tsui_holds}, factor {douglas_ok}"


def _trial_prop33m(trial, dim, seed, tol):
    m = 3 + trial % 2
    spec = ClassSpec(kind=K.M_QUASI_ISOMETRY, dim=dim, seed=seed, m=m, contractive=bool(trial % 3))
    T = generate(spec, tol)
    cond = fong_tsui_check(T, tol)
    form = canonical_form_37(T, tol)
    record = {
        "m": m,
        "defect": cond.fong_tsui_defect,
        "self_adjoint": cond.self_adjoint,
        "q_power_zero": op_norm(np.linalg.matrix_power(form.q, m)) <= PROPERTY_TOL if form.q.size else True,
        "q_square_zero": form.flags["q_square_zero"],
    }
    return True, {}, "", record


def _trial_brownian(trial, dim, seed, tol):
    if trial % 2 == 0:
        T = generate(ClassSpec(kind=K.UNITARY, dim=dim, seed=seed), tol)
        try:
            brownian_decompose(T, tol)
            return False, {}, "unitary accepted as a Brownian isometry"
        except SigmaZero:
            pass
        structure = two_isometry_structure(T, tol)
        residuals = {"s_isometry": structure.s_isometry, "lower_left": structure.lower_left,
                     "s_star_r": structure.s_star_r, "q_identity": structure.q_identity}
        return _ok(residuals), residuals, "unitary"
    T = generate(ClassSpec(kind=K.CONTRACTION, dim=dim, seed=seed), tol)
    try:
        brownian_decompose(T, tol)
    except NotTwoIsometry:
        return True, {}, "non-unitary"
    return False, {}, "non-unitary operator not rejected"


SUITES: Dict[str, Callable] = {
    "thm21": _trial_thm21,
    "thm31": _trial_thm31,
    "cor22": _trial_cor22,
    "cor35": _trial_cor35,
    "rmk23": _trial_rmk23,
    "oracle10": _trial_oracle10,
    "findim11": _trial_findim11,
    "polar41": _trial_polar41,
    "douglas42": _trial_douglas42,
    "prop33m": _trial_prop33m,
    "brownian": _trial_brownian,
    "fuzz": _trial_fuzz,
}

DEFAULT_TRIALS = {"thm21": 1000, "thm31": 1000, "cor22": 1000, "cor35": 200, "rmk23": 1000,
                  "oracle10": 1000, "findim11": 10000, "polar41": 4, "douglas42": 1000,
                  "prop33m": 100, "brownian": 200, "fuzz": 1000}
DEFAULT_DIMS = {"thm21": (2, 12), "cor35": (2, 10), "polar41": (1, 4)}


def default_dims(suite_id: str) -> Tuple[int, int]:
    return DEFAULT_DIMS.get(suite_id, (2, 8))


def _run_trial(suite_id: str, trial: int, dims: Sequence[int], seed: int, tol: Tolerances) -> TrialOutcome:
    fn = SUITES[suite_id]
    trial_seed = seed * SEED_STRIDE + trial
    dim = dims[trial % len(dims)]
    try:
        out = fn(trial, dim, trial_seed, tol)
    except TheoremViolation as e:
        logger.error(f"{suite_id} trial {trial} (seed {trial_seed}): {e}", exc_info=True)
        return TrialOutcome(trial_seed, dim, suite_id, False, note=f"TheoremViolation: {e}")
    except ToolkitError as e:
        logger.error(f"{suite_id} trial {trial} (seed {trial_seed}): {e}", exc_info=True)
        return TrialOutcome(trial_seed, dim, suite_id, False, note=f"{type(e).__name__}: {e}")
    passed, residuals, note = out[:3]
    record = out[3] if len(out) > 3 else {}
    return TrialOutcome(trial_seed, dim, suite_id, bool(passed), residuals, dict(record), note)


def theorem_suite(suite_id: str, trials: Optional[int], dims: Sequence[int], seed: int,
                  tol: Tolerances, workers: int = 1) -> SuiteReport:
    if suite_id not in SUITES:
        raise UnknownSuite(f"unknown suite '{suite_id}'; known: {', '.join(sorted(SUITES))}")
    if trials is None:
        trials = DEFAULT_TRIALS[suite_id]
    dims = list(dims)
    if not dims or min(dims) < 1:
        raise ValueError(f"dimensions must be >= 1, got {dims}")
    logger.info(f"Running suite {suite_id}: {trials} trials over dims {dims[0]}..{dims[-1]} seed {seed}")

    outcomes = run_sharded(lambda t: _run_trial(suite_id, t, dims, seed, tol), list(range(trials)), workers)

    report = SuiteReport(suite=suite_id, trials=trials, passes=0, failures=0)
    for outcome in outcomes:
        if outcome.passed:
            report.passes += 1
        else:
            report.failures += 1
            report.failing_seeds.append(outcome.seed)
            logger.warning(f"{suite_id} failed at seed {outcome.seed} dim {outcome.dim}: {outcome.note}")
        for key, value in outcome.residuals.items():
            report.worst_residuals[key] = max(report.worst_residuals.get(key, 0.0), float(value))
        if outcome.record:
            report.records.append({"seed": outcome.seed, "dim": outcome.dim, **outcome.record})
    logger.info(f"Suite {suite_id}: {report.passes}/{trials} passed")
    return report
