"""
Block matrix view of an operator on an orthogonal decomposition of the space.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np

from src.linalg.core import ComplexMatrix, adjoint, op_norm
from src.linalg.subspace import Subspace, compress, orthogonality_residual
from src.utils.config import Tolerances
from src.utils.errors import DimensionMismatch, StructureMismatch

logger = logging.getLogger(__name__)


@dataclass
class BlockDecomposition:
    parts: List[Subspace]
    labels: List[str]
    blocks: List[List[ComplexMatrix]]   # blocks[i][j] = compress(T, parts[j], parts[i])
    operator: ComplexMatrix
    flags: Dict[str, bool] = field(default_factory=dict)
    residuals: Dict[str, float] = field(default_factory=dict)

    @property
    def dims(self) -> List[int]:
        return [p.rank for p in self.parts]

    def block(self, row: str, col: str) -> ComplexMatrix:
        return self.blocks[self.labels.index(row)][self.labels.index(col)]

    def basis(self) -> ComplexMatrix:
        n = self.operator.shape[0]
        if not self.parts:
            return np.zeros((n, 0), dtype=np.complex128)
        return np.hstack([p.basis for p in self.parts])

    def reassemble(self) -> ComplexMatrix:
        """Operator in the ambient basis rebuilt from the blocks"""
        B = self.basis()
        inner = np.block(self.blocks) if self.parts else np.zeros((0, 0), dtype=np.complex128)
        return B @ inner @ adjoint(B)

    def reconstruction_residual(self) -> float:
        return op_norm(self.reassemble() - self.operator)

    def orthogonality_residual(self) -> float:
        worst = 0.0
        for i, a in enumerate(self.parts):
            for b in self.parts[i + 1:]:
                worst = max(worst, orthogonality_residual(a, b))
        return worst

    def block_norms(self) -> List[List[float]]:
        return [[op_norm(b) for b in row] for row in self.blocks]

    def check(self, tol: Tolerances) -> None:
        """Raise StructureMismatch if the parts are not orthogonal or do not rebuild T"""
        scale = max(op_norm(self.operator), 1.0)
        ortho = self.orthogonality_residual()
        if ortho > tol.eq:
            raise StructureMismatch("parts pairwise orthogonal", ortho)
        recon = self.reconstruction_residual()
        if recon > tol.eq * scale:
            raise StructureMismatch("blocks reassemble the operator", recon)


def block_decomposition(T: ComplexMatrix, parts: Sequence[Subspace], labels: Sequence[str],
                        tol: Tolerances, check: bool = True) -> BlockDecomposition:
    if len(parts) != len(labels):
        raise DimensionMismatch(f"{len(parts)} parts but {len(labels)} labels")
    total = sum(p.rank for p in parts)
    if total != T.shape[0]:
        raise DimensionMismatch(f"parts have total dimension {total}, operator has {T.shape[0]}")
    blocks = [[compress(T, src, dst) for src in parts] for dst in parts]
    decomposition = BlockDecomposition(list(parts), list(labels), blocks, T)
    logger.debug(f"block decomposition {dict(zip(labels, decomposition.dims))}")
    if check:
        decomposition.check(tol)
    return decomposition
