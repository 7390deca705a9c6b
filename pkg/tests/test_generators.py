import numpy as np
import pytest

from src.data import generators
from src.data.generators import (
    MAX_ATTEMPTS,
    ClassSpec,
    GeneratorKind,
    generate,
    haar_unitary,
    paper_example_41,
    perturb,
    stream,
)
from src.linalg.core import op_norm
from src.operators.classes import classify
from src.utils.config import Tolerances
from src.utils.errors import GenerationFailed

TOL = Tolerances()


def test_stream_is_keyed_by_seed_and_attempt():
    assert stream(5, 1).random() == stream(5, 1).random()
    assert stream(5, 0).random() != stream(5, 1).random()
    assert stream(5).random() == stream(5, 0).random()


def test_haar_unitary_is_unitary():
    U = haar_unitary(6, stream(3))
    assert op_norm(U.conj().T @ U - np.eye(6)) <= 1e-12


@pytest.mark.parametrize("kind", list(GeneratorKind))
@pytest.mark.parametrize("dim", [1, 2, 4])
def test_every_kind_generates(kind, dim):
    spec = ClassSpec(kind=kind, dim=dim, seed=11)
    T = generate(spec, TOL)
    assert T.shape == (dim, dim)
    assert T.dtype == np.complex128
    assert np.array_equal(T, generate(spec, TOL))


def test_seeds_give_different_operators():
    a = generate(ClassSpec(GeneratorKind.CONTRACTION, 4, seed=1))
    b = generate(ClassSpec(GeneratorKind.CONTRACTION, 4, seed=2))
    assert not np.allclose(a, b)


def test_kind_string_is_coerced():
    assert ClassSpec("unitary", 2, 0).kind is GeneratorKind.UNITARY


def test_partial_isometry_rank():
    T = generate(ClassSpec(GeneratorKind.PARTIAL_ISOMETRY, 5, seed=4, rank=2))
    assert np.linalg.matrix_rank(T) == 2
    assert classify(T, [], TOL).partial_isometry.holds


def test_nilpotent_order():
    T = generate(ClassSpec(GeneratorKind.NILPOTENT, 5, seed=9, order=3))
    assert classify(T, [], TOL).nilpotent_order == 3
    assert op_norm(T) == pytest.approx(1.0)


@pytest.mark.parametrize("contractive", [True, False])
def test_quasi_isometry(contractive):
    T = generate(ClassSpec(GeneratorKind.M_QUASI_ISOMETRY, 5, seed=2, m=3, contractive=contractive))
    c = classify(T, [3], TOL)
    assert c.m_quasi_isometry[3].holds
    if contractive:
        assert c.contraction.holds


def test_symmetry_plus_zero_rank():
    T = generate(ClassSpec(GeneratorKind.SYMMETRY_PLUS_ZERO, 4, seed=0, rank=3))
    assert np.linalg.matrix_rank(T) == 3
    assert op_norm(T @ T @ T - T) <= 1e-12


def test_hermitian_plus_perturbation_distance():
    base = generate(ClassSpec(GeneratorKind.HERMITIAN_PLUS_PERTURBATION, 3, seed=6))
    T = generate(ClassSpec(GeneratorKind.HERMITIAN_PLUS_PERTURBATION, 3, seed=6, epsilon=1e-3))
    assert np.linalg.norm(T - base, "fro") == pytest.approx(1e-3)


def test_generation_failure(monkeypatch):
    monkeypatch.setattr(generators, "_verified", lambda spec, T, c: False)
    with pytest.raises(GenerationFailed) as info:
        generate(ClassSpec(GeneratorKind.UNITARY, 2, seed=0))
    assert info.value.attempts == MAX_ATTEMPTS
    assert info.value.kind == "unitary"


@pytest.mark.parametrize(
    "kwargs",
    [
        {"dim": 0},
        {"seed": -1},
        {"seed": 2 ** 64},
        {"rank": 5},
        {"order": 0},
        {"m": 0},
        {"epsilon": -1.0},
    ],
)
def test_class_spec_validation(kwargs):
    base = {"kind": GeneratorKind.CONTRACTION, "dim": 3, "seed": 0}
    base.update(kwargs)
    with pytest.raises(ValueError):
        ClassSpec(**base)


def test_perturb():
    T = np.eye(3, dtype=np.complex128)
    same = perturb(T, 0.0, 1)
    assert np.array_equal(same, T) and same is not T
    assert np.linalg.norm(perturb(T, 0.25, 1) - T, "fro") == pytest.approx(0.25)
    assert np.array_equal(perturb(T, 0.25, 1), perturb(T, 0.25, 1))
    with pytest.raises(ValueError):
        perturb(T, -0.1, 1)


def test_worked_example_matrices():
    T, U = paper_example_41(2)
    assert T.dtype == np.int64 and U.dtype == np.int64
    assert T.shape == (4, 4)
    assert not (T @ T).any()
    assert np.array_equal(U @ U, np.eye(4, dtype=np.int64))
    assert np.array_equal(U, U.T)
    with pytest.raises(ValueError):
        paper_example_41(0)
