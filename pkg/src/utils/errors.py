"""
Exception hierarchy for the toolkit.

Library code raises these; only the CLI and the corpus runners catch them.
"""

from typing import Optional


class ToolkitError(ValueError):
    """Base class for every error raised by the toolkit"""


class InvalidMatrix(ToolkitError):
    """Input is not a finite two-dimensional numeric array"""


class DimensionMismatch(ToolkitError):
    pass


class NotHermitian(ToolkitError):
    pass


class NotPSD(ToolkitError):
    pass


class NoConvergence(ToolkitError):
    pass


class NotContraction(ToolkitError):
    pass


class NotTwoIsometry(ToolkitError):
    pass


class SigmaZero(ToolkitError):
    """2-isometry with T*T = I: unitary, no positive covariance"""


class NotQuasiIsometry(ToolkitError):
    pass


class NotInvariant(ToolkitError):
    pass


class ConditionFails(ToolkitError):
    """The operation needs |T| <= |Re T| and it does not hold"""


class ZeroOperator(ToolkitError):
    pass


class SpanMismatch(ToolkitError):
    """Computed parts do not exhaust the ambient space (tolerance breakdown)"""


class UnknownSuite(ToolkitError):
    pass


class GenerationFailed(ToolkitError):
    def __init__(self, kind: str, attempts: int):
        super().__init__(f"could not generate a verified '{kind}' operator after {attempts} attempts")
        self.kind = kind
        self.attempts = attempts


class StructureMismatch(ToolkitError):
    """A structural invariant of a block form failed"""

    def __init__(self, invariant: str, residual: Optional[float] = None):
        detail = f" (residual {residual:.3e})" if residual is not None else ""
        super().__init__(f"structure invariant failed: {invariant}{detail}")
        self.invariant = invariant
        self.residual = residual


class TheoremViolation(ToolkitError):
    """
    A theorem conclusion failed on an operator satisfying its hypotheses.

    Reaching this on a verified input is a defect (numerics or a counterexample),
    never a user error.
    """

    def __init__(self, assertion: str, residual: Optional[float] = None):
        detail = f" (residual {residual:.3e})" if residual is not None else ""
        super().__init__(f"theorem assertion failed: {assertion}{detail}")
        self.assertion = assertion
        self.residual = residual
