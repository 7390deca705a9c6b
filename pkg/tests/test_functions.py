import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from src.data.generators import ClassSpec, GeneratorKind, generate, haar_unitary, paper_example_41, stream
from src.linalg.core import adjoint, loewner_leq, op_norm
from src.operators.functions import (
    asymmetry,
    douglas_factor,
    fong_tsui_check,
    operator_functions,
    polar_real_part,
)
from src.utils.config import Tolerances

TOL = Tolerances()


def test_nilpotent_modulus_identities(nilpotent):
    funcs = operator_functions(nilpotent, TOL)
    assert_allclose(funcs.modulus, np.diag([0.0, 1.0]), atol=1e-12)
    assert_allclose(funcs.abs_real_part, np.diag([0.5, 0.5]), atol=1e-12)
    assert funcs.norm == pytest.approx(1.0)


def test_nilpotent_condition_fails(nilpotent):
    cond = fong_tsui_check(nilpotent, TOL)
    assert not cond.fong_tsui_holds
    assert cond.fong_tsui_defect == pytest.approx(-0.5, abs=1e-10)
    assert not cond.self_adjoint
    assert not cond.fong_istratescu_holds


def test_symmetry_satisfies_condition(symmetry):
    cond = fong_tsui_check(symmetry, TOL)
    assert cond.fong_tsui_holds and cond.self_adjoint and cond.mortad_commutes
    assert cond.fong_tsui_defect == pytest.approx(0.0, abs=1e-12)


def test_three_cycle_fails():
    P = np.roll(np.eye(3), 1, axis=0)
    cond = fong_tsui_check(P, TOL)
    assert not cond.fong_tsui_holds
    assert_allclose(operator_functions(P, TOL).modulus, np.eye(3), atol=1e-12)


def test_hermitian_modulus_equals_abs_real_part(rng):
    X = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    H = (X + X.conj().T) / 2
    funcs = operator_functions(H, TOL)
    assert_allclose(funcs.modulus, funcs.abs_real_part, atol=1e-10)


def test_violated_direction_is_the_bad_eigenvector(nilpotent):
    v = fong_tsui_check(nilpotent, TOL).violated_direction
    assert abs(v[1]) == pytest.approx(1.0)


def test_polar_real_part_examples():
    P = np.diag([2.0, 0.0, 1.0]).astype(np.complex128)
    assert_allclose(polar_real_part(P, TOL).u_tilde, np.diag([1.0, 0.0, 1.0]), atol=1e-12)
    assert_allclose(polar_real_part(np.array([[-3.0]]), TOL).u_tilde, [[-1.0]])


@pytest.mark.parametrize("half_dim", [1, 2, 3, 4])
def test_polar_factor_of_worked_example(half_dim):
    T, U = paper_example_41(half_dim)
    polar = polar_real_part(T.astype(np.complex128), TOL)
    assert_allclose(polar.u_tilde, U, atol=1e-12)
    I, Z = np.eye(half_dim), np.zeros((half_dim, half_dim))
    assert_allclose(T @ polar.u_tilde, np.block([[I, Z], [Z, Z]]), atol=1e-12)
    assert_allclose(polar.u_tilde @ T, np.block([[Z, Z], [Z, I]]), atol=1e-12)
    assert polar.fixed_points_match


def test_polar_reconstructs_real_part(random_contraction):
    T = random_contraction(6)
    polar = polar_real_part(T, TOL)
    assert_allclose(polar.u_tilde @ polar.abs_real_part, (T + adjoint(T)) / 2, atol=1e-10)
    assert_allclose(polar.u_tilde, adjoint(polar.u_tilde), atol=1e-12)


def test_douglas_examples(nilpotent, symmetry):
    factor = douglas_factor(nilpotent, TOL)
    assert_allclose(factor.a, np.sqrt(2) * np.diag([0.0, 1.0]), atol=1e-10)
    assert factor.norm_a == pytest.approx(np.sqrt(2))
    assert factor.range_condition and not factor.is_contraction

    factor = douglas_factor(symmetry, TOL)
    assert factor.is_contraction and factor.range_condition
    assert factor.real_square_contraction and factor.modulus_square_bound

    zero = douglas_factor(np.zeros((3, 3)), TOL)
    assert_allclose(zero.a, 0)


def test_douglas_on_self_adjoint_is_range_projector():
    H = np.diag([0.7, -0.2, 0.0]).astype(np.complex128)
    assert_allclose(douglas_factor(H, TOL).a, np.diag([1.0, 1.0, 0.0]), atol=1e-10)


@given(st.integers(1, 8), st.integers(0, 2 ** 32 - 1))
def test_unitary_conjugation_covariance(n, seed):
    g = stream(seed)
    T = generate(ClassSpec(kind=GeneratorKind.CONTRACTION, dim=n, seed=seed), TOL)
    W = haar_unitary(n, g)
    base = operator_functions(T, TOL)
    moved = operator_functions(W @ T @ adjoint(W), TOL)
    assert_allclose(moved.modulus, W @ base.modulus @ adjoint(W), atol=1e-8)
    assert_allclose(moved.abs_real_part, W @ base.abs_real_part @ adjoint(W), atol=1e-8)
    d0 = fong_tsui_check(T, TOL).fong_tsui_defect
    d1 = fong_tsui_check(W @ T @ adjoint(W), TOL).fong_tsui_defect
    assert d1 == pytest.approx(d0, abs=1e-8)


@pytest.mark.parametrize("alpha", [0.25, 3.0])
def test_positive_scaling_covariance(alpha, random_contraction, nilpotent, symmetry):
    for T in (random_contraction(4), nilpotent, symmetry):
        base, scaled = fong_tsui_check(T, TOL), fong_tsui_check(alpha * T, TOL)
        assert base.fong_tsui_holds == scaled.fong_tsui_holds
        assert scaled.fong_tsui_defect == pytest.approx(alpha * base.fong_tsui_defect, abs=1e-9)


@given(st.integers(2, 8), st.integers(0, 2 ** 32 - 1), st.sampled_from(["ginibre", "hermitian", "perturbed"]))
def test_fong_istratescu_oracle(n, seed, family):
    g = stream(seed)
    X = (g.standard_normal((n, n)) + 1j * g.standard_normal((n, n))) / np.sqrt(2)
    H = (X + X.conj().T) / 2
    T = {"ginibre": X, "hermitian": H, "perturbed": H + 1e-2 * X / np.linalg.norm(X)}[family]
    cond = fong_tsui_check(T, TOL)
    hermitian = np.linalg.norm(T - adjoint(T)) <= 1e-8 * np.linalg.norm(T)
    assert cond.fong_istratescu_holds == hermitian


def test_real_part_lemma(rng):
    # I <= Re X with ||X|| <= 1 forces X = I
    assert loewner_leq(np.eye(4), np.eye(4), TOL)[0]
    for eps in (1e-1, 1e-3):
        S = rng.standard_normal((4, 4))
        X = np.eye(4) + 1j * eps * (S + S.T)
        X = X / op_norm(X)
        holds, _ = loewner_leq(np.eye(4), (X + adjoint(X)) / 2, TOL)
        assert holds == (op_norm(X - np.eye(4)) <= 1e-7)


def test_asymmetry():
    assert asymmetry(np.zeros((2, 2))) == 0.0
    assert asymmetry(np.eye(2)) == 0.0
    assert asymmetry(np.array([[0.0, 1.0], [0.0, 0.0]])) == pytest.approx(np.sqrt(2))
