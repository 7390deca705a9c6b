import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from numpy.testing import assert_allclose

from src.linalg.core import (
    as_matrix,
    hermitian_eig,
    loewner_leq,
    op_norm,
    pinv,
    psd_sqrt,
    require_square,
    svd,
)
from src.utils.config import Tolerances
from src.utils.errors import InvalidMatrix, NotHermitian, NotPSD

TOL = Tolerances()

square_real = st.integers(min_value=1, max_value=6).flatmap(
    lambda n: arrays(np.float64, (n, n), elements=st.floats(-10, 10, allow_nan=False, allow_infinity=False))
)


def test_as_matrix_rejects_bad_input():
    with pytest.raises(InvalidMatrix):
        as_matrix([1.0, 2.0])
    with pytest.raises(InvalidMatrix):
        as_matrix([[1.0, np.nan]])
    with pytest.raises(InvalidMatrix):
        require_square(np.zeros((2, 3)))


def test_hermitian_eig_examples():
    eig = hermitian_eig(np.eye(3), TOL)
    assert_allclose(eig.eigenvalues, [1, 1, 1])
    assert_allclose(eig.eigenvectors.conj().T @ eig.eigenvectors, np.eye(3), atol=1e-12)
    assert_allclose(hermitian_eig(np.diag([2.0, -1.0]), TOL).eigenvalues, [-1, 2])
    assert_allclose(hermitian_eig(np.array([[0, 1], [1, 0]]), TOL).eigenvalues, [-1, 1], atol=1e-12)


def test_hermitian_eig_rejects_non_hermitian(nilpotent):
    with pytest.raises(NotHermitian):
        hermitian_eig(nilpotent, TOL)


def test_hermitian_eig_is_deterministic(rng):
    A = rng.standard_normal((5, 5))
    A = A + A.T
    first, second = hermitian_eig(A, TOL), hermitian_eig(A, TOL)
    assert np.array_equal(first.eigenvalues, second.eigenvalues)
    assert np.array_equal(first.eigenvectors, second.eigenvectors)


def test_svd_examples(nilpotent, random_unitary):
    _, s, _ = svd(np.zeros((3, 3)), TOL)
    assert_allclose(s, 0)
    _, s, _ = svd(nilpotent, TOL)
    assert_allclose(s, [1, 0], atol=1e-15)
    _, s, _ = svd(random_unitary(4), TOL)
    assert_allclose(s, 1, atol=1e-12)


@given(square_real)
def test_svd_reconstructs(A):
    U, s, V = svd(A, TOL)
    n = A.shape[0]
    S = np.zeros((n, n))
    S[np.arange(s.size), np.arange(s.size)] = s
    assert_allclose(U @ S @ V.conj().T, A, atol=1e-9 * max(np.linalg.norm(A), 1.0))
    assert np.all(np.diff(s) <= 0)


def test_psd_sqrt_examples():
    assert_allclose(psd_sqrt(np.diag([4.0, 9.0]), TOL), np.diag([2.0, 3.0]), atol=1e-12)
    assert_allclose(psd_sqrt(np.eye(3), TOL), np.eye(3), atol=1e-12)
    A = np.array([[2.0, 1.0], [1.0, 2.0]])
    R = psd_sqrt(A, TOL)
    assert_allclose(R @ R, A, atol=1e-12)


def test_psd_sqrt_rejects_negative():
    with pytest.raises(NotPSD):
        psd_sqrt(np.diag([1.0, -0.5]), TOL)


def test_psd_sqrt_clamps_rounding_negatives():
    R = psd_sqrt(np.diag([1.0, -1e-13]), TOL)
    assert_allclose(R, np.diag([1.0, 0.0]), atol=1e-12)


@given(st.integers(1, 32), st.integers(0, 2 ** 32 - 1))
def test_psd_sqrt_squares_back(n, seed):
    g = np.random.default_rng(seed)
    X = g.standard_normal((n, n)) + 1j * g.standard_normal((n, n))
    A = X @ X.conj().T
    R = psd_sqrt(A, TOL)
    assert np.linalg.norm(R @ R - A) <= 1e-9 * max(np.linalg.norm(A), 1.0)


def test_loewner_examples():
    A = np.diag([1.0, 2.0])
    assert loewner_leq(A, A, TOL) == (True, 0.0)
    holds, defect = loewner_leq(np.diag([0.0, 1.0]), np.diag([0.5, 0.5]), TOL)
    assert not holds
    assert defect == pytest.approx(-0.5)
    holds, _ = loewner_leq(np.zeros((2, 2)), np.array([[2.0, 1.0], [1.0, 2.0]]), TOL)
    assert holds


def test_loewner_rejects_non_hermitian(nilpotent):
    with pytest.raises(NotHermitian):
        loewner_leq(nilpotent, np.eye(2), TOL)


def test_loewner_transitive_on_chain(rng):
    X = rng.standard_normal((4, 4))
    A = X @ X.T
    B = A + np.eye(4)
    C = B + np.diag([0.0, 1.0, 2.0, 3.0])
    assert loewner_leq(A, B, TOL)[0] and loewner_leq(B, C, TOL)[0] and loewner_leq(A, C, TOL)[0]


def test_pinv_examples():
    assert_allclose(pinv(np.eye(3), TOL), np.eye(3), atol=1e-12)
    assert_allclose(pinv(np.diag([2.0, 0.0]), TOL), np.diag([0.5, 0.0]), atol=1e-12)
    assert_allclose(pinv(np.array([[1.0], [1.0]]), TOL), [[0.5, 0.5]], atol=1e-12)


def test_pinv_penrose_identities(rng):
    A = rng.standard_normal((6, 3)) @ rng.standard_normal((3, 6))
    P = pinv(A, TOL)
    scale = max(op_norm(A), 1.0)
    assert op_norm(A @ P @ A - A) <= 1e-6 * scale
    assert op_norm(P @ A @ P - P) <= 1e-6 * max(op_norm(P), 1.0)
    assert op_norm((A @ P).conj().T - A @ P) <= 1e-8
    assert op_norm((P @ A).conj().T - P @ A) <= 1e-8
