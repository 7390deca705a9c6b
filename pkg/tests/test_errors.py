import pytest

from src.utils.errors import (
    GenerationFailed,
    NotContraction,
    StructureMismatch,
    TheoremViolation,
    ToolkitError,
)


def test_hierarchy_is_value_error():
    assert issubclass(ToolkitError, ValueError)
    with pytest.raises(ValueError):
        raise NotContraction("||T|| = 2")


def test_structured_errors_carry_residuals():
    e = StructureMismatch("lower-left block vanishes", 1.5e-3)
    assert e.invariant == "lower-left block vanishes" and e.residual == 1.5e-3
    assert "1.500e-03" in str(e)
    v = TheoremViolation("M* contained in M")
    assert v.residual is None and "M* contained in M" in str(v)


def test_generation_failed_message():
    e = GenerationFailed("unitary", 100)
    assert e.kind == "unitary" and e.attempts == 100
    assert "100 attempts" in str(e)
