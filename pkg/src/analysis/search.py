"""
Randomized local search for operators that come close to |T| <= |Re T| while
staying a fixed distance from self-adjoint.

The objective is the defect min-eig(|Re T| - |T|) of T / ||T||; the asymmetry
constraint ||T - T*||_F / ||T||_F >= delta is enforced by rejecting proposals.
"""

import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np
import scipy.linalg

from src.data.generators import crandn, stream
from src.linalg.core import ComplexMatrix, adjoint, hermitian_part, op_norm
from src.operators.functions import asymmetry, operator_functions
from src.utils.concurrency import run_sharded
from src.utils.config import Tolerances

logger = logging.getLogger(__name__)

INITIAL_STEP = 0.1
STEP_FLOOR = 1e-9
REJECTIONS_BEFORE_DECAY = 20
START_DRAWS = 100


@dataclass
class RestartOutcome:
    restart: int
    best_defect: float
    best_asymmetry: float
    incumbent: ComplexMatrix
    evaluations: int


@dataclass
class SearchResult:
    dim: int
    delta: float
    best_defect: float
    best_asymmetry: float
    incumbent: ComplexMatrix
    evaluations: int
    trace: List[float] = field(default_factory=list)


def defect(T: ComplexMatrix, tol: Tolerances) -> float:
    """min-eig(|Re T0| - |T0|) with T0 = T / ||T||"""
    norm = op_norm(T)
    if norm == 0.0:
        return 0.0
    funcs = operator_functions(T / norm, tol)
    return float(scipy.linalg.eigvalsh(hermitian_part(funcs.abs_real_part - funcs.modulus))[0])


def _near_symmetric_start(n: int, delta: float, rng: np.random.Generator) -> ComplexMatrix:
    """Hermitian H plus a skew part sized so the asymmetry is 1.1 delta"""
    G = crandn(rng, n, n)
    H = hermitian_part(G)
    a = min(1.1 * delta, 1.99)
    if a == 0.0:
        return H / op_norm(H)
    K = crandn(rng, n, n)
    skew = (K - adjoint(K)) / 2
    h = np.linalg.norm(H, "fro")
    skew *= a * h / np.sqrt(4.0 - a * a) / np.linalg.norm(skew, "fro")
    T = H + skew
    return T / op_norm(T)


def _ginibre_start(n: int, delta: float, rng: np.random.Generator) -> ComplexMatrix:
    for _ in range(START_DRAWS):
        T = crandn(rng, n, n)
        if asymmetry(T) >= delta:
            return T / op_norm(T)
    return _near_symmetric_start(n, delta, rng)


def _local_search(dim: int, iters: int, delta: float, seed: int, restart: int,
                  tol: Tolerances) -> RestartOutcome:
    rng = stream(seed, restart)
    if restart % 2 == 0:
        T = _near_symmetric_start(dim, delta, rng)
    else:
        T = _ginibre_start(dim, delta, rng)
    best = defect(T, tol)
    evaluations = 1
    step = INITIAL_STEP
    rejections = 0
    for _ in range(iters):
        i, j = rng.integers(dim, size=2)
        proposal = T.copy()
        proposal[i, j] += step * (rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2)
        proposal /= op_norm(proposal)
        accepted = False
        if asymmetry(proposal) >= delta:
            value = defect(proposal, tol)
            evaluations += 1
            if value > best:
                T, best = proposal, value
                accepted = True
        if accepted:
            rejections = 0
        else:
            rejections += 1
            if rejections >= REJECTIONS_BEFORE_DECAY:
                step = max(step / 2, STEP_FLOOR)
                rejections = 0
    logger.debug(f"restart {restart}: best defect {best:.3e}, final step {step:.1e}")
    return RestartOutcome(restart, best, asymmetry(T), T, evaluations)


def counterexample_search(dim: int, restarts: int, iters_per_restart: int, delta: float, seed: int,
                          tol: Tolerances, workers: int = 1) -> SearchResult:
    if dim < 2:
        raise ValueError(f"search needs dim >= 2, got {dim}")
    if restarts < 1:
        raise ValueError(f"need at least one restart, got {restarts}")
    if not 0.0 <= delta < 2.0:
        raise ValueError(f"asymmetry threshold must lie in [0, 2), got {delta}")

    outcomes = run_sharded(
        lambda r: _local_search(dim, iters_per_restart, delta, seed, r, tol),
        list(range(restarts)),
        workers,
    )
    winner = max(outcomes, key=lambda o: (o.best_defect, -o.restart))
    result = SearchResult(
        dim=dim,
        delta=delta,
        best_defect=winner.best_defect,
        best_asymmetry=winner.best_asymmetry,
        incumbent=winner.incumbent,
        evaluations=sum(o.evaluations for o in outcomes),
        trace=[o.best_defect for o in outcomes],
    )
    logger.info(f"dim {dim}: best defect {result.best_defect:.3e} at asymmetry {result.best_asymmetry:.3f} "
                f"over {restarts} restarts ({result.evaluations} evaluations)")
    if result.best_defect >= -tol.psd and result.best_asymmetry >= delta > 0:
        logger.error(f"search incumbent reaches the condition within slack at asymmetry {result.best_asymmetry:.3f}")
    return result
