import numpy as np
import pytest

from src.analysis.search import counterexample_search, defect
from src.utils.config import Tolerances

TOL = Tolerances()


def test_defect_examples(nilpotent, symmetry):
    assert defect(np.zeros((2, 2)), TOL) == 0.0
    assert defect(symmetry, TOL) == pytest.approx(0.0, abs=1e-12)
    assert defect(nilpotent, TOL) == pytest.approx(-0.5)
    assert defect(3.0 * nilpotent, TOL) == pytest.approx(-0.5)


def test_search_stays_below_zero():
    result = counterexample_search(3, restarts=2, iters_per_restart=40, delta=0.5, seed=1, tol=TOL)
    assert result.best_defect < 0
    assert result.best_asymmetry >= 0.5
    assert len(result.trace) == 2
    assert result.evaluations >= 2
    assert result.best_defect == max(result.trace)
    assert abs(np.linalg.norm(result.incumbent, 2) - 1.0) <= 1e-12


def test_search_is_deterministic():
    a = counterexample_search(3, 3, 25, 0.3, seed=7, tol=TOL)
    b = counterexample_search(3, 3, 25, 0.3, seed=7, tol=TOL, workers=3)
    assert a.best_defect == b.best_defect
    assert a.trace == b.trace
    assert np.array_equal(a.incumbent, b.incumbent)


def test_zero_threshold_reaches_self_adjoint():
    result = counterexample_search(4, 2, 10, 0.0, seed=0, tol=TOL)
    assert abs(result.best_defect) <= 1e-8


@pytest.mark.parametrize(
    "dim,restarts,delta",
    [(1, 1, 0.1), (3, 0, 0.1), (3, 1, -0.1), (3, 1, 2.0)],
)
def test_search_rejects_bad_arguments(dim, restarts, delta):
    with pytest.raises(ValueError):
        counterexample_search(dim, restarts, 10, delta, seed=0, tol=TOL)


@pytest.mark.slow
@pytest.mark.parametrize("dim", [2, 3, 4, 5, 6])
def test_search_finds_no_counterexample(dim):
    result = counterexample_search(dim, 50, 2000, 0.1, seed=0, tol=TOL, workers=4)
    assert result.best_asymmetry >= 0.1
    assert result.best_defect < -TOL.psd
    if dim == 2:
        assert result.best_defect < -1e-4
