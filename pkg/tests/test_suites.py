import pytest

from src.analysis.suites import (
    DEFAULT_TRIALS,
    SATISFIER_CORPUS,
    SEED_STRIDE,
    SUITES,
    default_dims,
    theorem_suite,
)
from src.data.generators import ClassSpec, generate
from src.operators.functions import fong_tsui_check
from src.utils.config import Tolerances
from src.utils.errors import UnknownSuite

TOL = Tolerances()

SMALL_DIMS = {"polar41": [1, 2, 3]}


@pytest.mark.parametrize("suite_id", sorted(SUITES))
def test_suite_passes_on_a_small_run(suite_id):
    dims = SMALL_DIMS.get(suite_id, [2, 3, 4])
    report = theorem_suite(suite_id, 6, dims, seed=3, tol=TOL)
    assert report.trials == 6
    assert report.passes + report.failures == 6
    assert report.all_passed, report.failing_seeds


def test_suite_is_deterministic_across_workers():
    a = theorem_suite("thm21", 8, [2, 3, 5], seed=1, tol=TOL)
    b = theorem_suite("thm21", 8, [2, 3, 5], seed=1, tol=TOL, workers=4)
    assert a.worst_residuals == b.worst_residuals
    assert a.passes == b.passes


def test_records_carry_seed_and_dim():
    report = theorem_suite("prop33m", 4, [3, 4], seed=2, tol=TOL)
    assert [r["seed"] for r in report.records] == [2 * SEED_STRIDE + t for t in range(4)]
    assert [r["dim"] for r in report.records] == [3, 4, 3, 4]
    assert {r["m"] for r in report.records} == {3, 4}


def test_default_trials_cover_every_suite():
    assert set(DEFAULT_TRIALS) == set(SUITES)
    assert default_dims("thm21") == (2, 12)
    assert default_dims("oracle10") == (2, 8)


def test_satisfier_corpus_mostly_meets_the_condition():
    hits = 0
    for t in range(2 * len(SATISFIER_CORPUS)):
        kind, params = SATISFIER_CORPUS[t % len(SATISFIER_CORPUS)]
        T = generate(ClassSpec(kind=kind, dim=(2, 4)[t % 2], seed=t, **params), TOL)
        hits += fong_tsui_check(T, TOL).fong_tsui_holds
    assert hits >= len(SATISFIER_CORPUS)


def test_unknown_suite():
    with pytest.raises(UnknownSuite):
        theorem_suite("thm99", 1, [2], seed=0, tol=TOL)


def test_empty_dims_rejected():
    with pytest.raises(ValueError):
        theorem_suite("thm21", 1, [], seed=0, tol=TOL)


@pytest.mark.slow
@pytest.mark.parametrize("suite_id", ["thm21", "thm31", "cor22", "rmk23", "oracle10", "douglas42"])
def test_suite_larger_run(suite_id):
    lo, hi = default_dims(suite_id)
    report = theorem_suite(suite_id, 100, list(range(lo, hi + 1)), seed=0, tol=TOL, workers=4)
    assert report.all_passed, report.failing_seeds


@pytest.mark.slow
@pytest.mark.parametrize("suite_id", ["cor35", "findim11", "douglas42"])
def test_suite_default_trial_counts(suite_id):
    lo, hi = default_dims(suite_id)
    report = theorem_suite(suite_id, None, list(range(lo, hi + 1)), seed=0, tol=TOL, workers=4)
    assert report.trials == DEFAULT_TRIALS[suite_id]
    assert report.all_passed, report.failing_seeds
