import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.operators.classes import (
    brownian_decompose,
    classify,
    nilpotent_order,
    partial_isometry_residual,
    quasi_isometry_residual,
    two_isometry_structure,
)
from src.utils.config import Tolerances
from src.utils.errors import NotTwoIsometry, SigmaZero

TOL = Tolerances()


def test_nilpotent_classes(nilpotent):
    c = classify(nilpotent, [1, 2], TOL)
    assert c.partial_isometry.holds
    assert c.nilpotent_order == 2
    assert not c.hyponormal.holds
    assert c.contraction.holds and not c.pure_contraction.holds
    assert not c.isometry.holds and not c.normal.holds
    assert c.scaled_partial_isometry.holds


def test_idempotent_is_quasi_isometry_but_not_contraction():
    T = np.array([[1.0, 1.0], [0.0, 0.0]])
    c = classify(T, [1], TOL)
    assert c.m_quasi_isometry[1].holds
    assert not c.contraction.holds
    assert c.contraction.residual == pytest.approx(np.sqrt(2))


def test_unitary_classes(random_unitary):
    U = random_unitary(5)
    c = classify(U, [1, 2, 3], TOL)
    assert c.unitary.holds and c.isometry.holds and c.contraction.holds
    assert c.two_isometry.holds and c.normal.holds and c.hyponormal.holds
    assert all(flag.holds for flag in c.m_quasi_isometry.values())
    assert not c.pure_contraction.holds
    assert c.brownian_sigma is None and "SigmaZero" in c.brownian_reason


def test_symmetry_implies_the_chain(symmetry):
    c = classify(symmetry, [], TOL)
    assert c.symmetry.holds and c.unitary.holds and c.isometry.holds and c.contraction.holds
    assert c.self_adjoint.holds


def test_injective_partial_isometry_is_isometry(random_unitary):
    c = classify(random_unitary(3), [], TOL)
    assert c.partial_isometry.holds and c.isometry.holds


def test_pure_contraction(random_contraction):
    c = classify(0.5 * random_contraction(4), [], TOL)
    assert c.pure_contraction.holds and c.contraction.holds


def test_scaled_partial_isometry():
    T = 3.0 * np.diag([1.0, 0.0])
    c = classify(T, [], TOL)
    assert c.scaled_partial_isometry.holds and not c.partial_isometry.holds


def test_quasi_order_must_be_positive(nilpotent):
    with pytest.raises(ValueError):
        classify(nilpotent, [0], TOL)


def test_residual_helpers(nilpotent):
    assert partial_isometry_residual(nilpotent) == 0.0
    assert partial_isometry_residual(np.zeros((0, 0))) == 0.0
    assert quasi_isometry_residual(np.eye(3), 2) == 0.0
    assert nilpotent_order(np.zeros((2, 2)), TOL) == 1
    assert nilpotent_order(np.eye(2), TOL) is None


def test_brownian_rejects_unitary(random_unitary):
    with pytest.raises(SigmaZero):
        brownian_decompose(random_unitary(4), TOL)


def test_brownian_rejects_jordan_block():
    with pytest.raises(NotTwoIsometry):
        brownian_decompose(np.array([[1.0, 1.0], [0.0, 1.0]]), TOL)


def test_brownian_rejects_contractions(random_contraction):
    for n in (2, 3, 5):
        with pytest.raises(NotTwoIsometry):
            brownian_decompose(random_contraction(n), TOL)


def test_two_isometry_structure_on_unitary(random_unitary):
    U = random_unitary(4)
    s = two_isometry_structure(U, TOL)
    assert s.g.rank == 4 and s.g_perp.is_zero
    assert s.r.shape == (4, 0) and s.q.shape == (0, 0)
    assert s.s_isometry <= 1e-12 and s.lower_left == 0.0 and s.q_identity == 0.0
    assert s.delta_injective


def test_two_isometry_structure_identity():
    s = two_isometry_structure(np.eye(3), TOL)
    assert_allclose(s.s @ s.s.conj().T, np.eye(3), atol=1e-12)
    assert s.s_isometry <= 1e-12 and s.g_perp.is_zero


def test_two_isometry_structure_rejects(nilpotent):
    with pytest.raises(NotTwoIsometry):
        two_isometry_structure(nilpotent, TOL)
