"""
Matrix files: JSON {"rows": n, "cols": m, "data": [[re, im], ...]} (row-major) or
CSV with one matrix row per line and entries written as a+bi.

'-' reads standard input (format sniffed from the first non-blank character) or
writes standard output.
"""

import csv
import io
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from src.linalg.core import ComplexMatrix
from src.utils.errors import InvalidMatrix

logger = logging.getLogger(__name__)


class MatrixFile(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    rows: int
    cols: int
    data: List[List[float]]

    @model_validator(mode="after")
    def _check_shape(self) -> "MatrixFile":
        if self.rows < 0 or self.cols < 0:
            raise ValueError("rows and cols must be non-negative")
        if len(self.data) != self.rows * self.cols:
            raise ValueError(f"data has {len(self.data)} entries, expected {self.rows * self.cols}")
        for pair in self.data:
            if len(pair) != 2:
                raise ValueError("each entry must be a [re, im] pair")
            if not all(math.isfinite(x) for x in pair):
                raise ValueError("entries must be finite")
        return self

    @classmethod
    def from_array(cls, A) -> "MatrixFile":
        M = np.asarray(A, dtype=np.complex128)
        if M.ndim != 2:
            raise InvalidMatrix(f"expected a 2-D matrix, got {M.ndim} dimensions")
        data = [[float(z.real), float(z.imag)] for z in M.ravel()]
        return cls(rows=M.shape[0], cols=M.shape[1], data=data)

    def to_array(self) -> ComplexMatrix:
        flat = np.array([complex(re_, im) for re_, im in self.data], dtype=np.complex128)
        return flat.reshape(self.rows, self.cols)


def parse_complex(text: str) -> complex:
    """'a+bi', 'a-bi', 'a' or 'bi'; j is accepted for i"""
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j"))
    except ValueError as e:
        raise InvalidMatrix(f"cannot parse matrix entry '{text}'") from e


def format_complex(z: complex) -> str:
    re_, im = float(np.real(z)), float(np.imag(z))
    return f"{re_!r}{'+' if im >= 0 else '-'}{abs(im)!r}i"


def loads(text: str, fmt: Optional[str] = None) -> ComplexMatrix:
    stripped = text.lstrip()
    fmt = fmt or ("json" if stripped.startswith("{") else "csv")
    if fmt == "json":
        try:
            return MatrixFile.model_validate_json(text).to_array()
        except ValidationError as e:
            raise InvalidMatrix(f"invalid matrix file: {e.errors()[0]['msg']}") from e
    rows = [row for row in csv.reader(io.StringIO(text)) if any(cell.strip() for cell in row)]
    if not rows:
        raise InvalidMatrix("empty CSV matrix")
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise InvalidMatrix("CSV rows have different lengths")
    M = np.array([[parse_complex(cell) for cell in row] for row in rows], dtype=np.complex128)
    if not np.all(np.isfinite(M)):
        raise InvalidMatrix("matrix contains NaN or Inf entries")
    return M


def dumps(A, fmt: str = "json") -> str:
    M = np.asarray(A, dtype=np.complex128)
    if fmt == "json":
        return MatrixFile.from_array(M).model_dump_json() + "\n"
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    for row in M:
        writer.writerow([format_complex(z) for z in row])
    return buffer.getvalue()


def load_matrix(source: Union[str, Path]) -> ComplexMatrix:
    if str(source) == "-":
        return loads(sys.stdin.read())
    path = Path(source)
    fmt = "csv" if path.suffix.lower() == ".csv" else None
    logger.debug(f"Loading matrix from {path}")
    return loads(path.read_text(encoding="utf-8"), fmt)


def save_matrix(A, target: Union[str, Path], fmt: Optional[str] = None) -> None:
    if str(target) == "-":
        sys.stdout.write(dumps(A, fmt or "json"))
        return
    path = Path(target)
    fmt = fmt or ("csv" if path.suffix.lower() == ".csv" else "json")
    path.write_text(dumps(A, fmt), encoding="utf-8")
    logger.info(f"Wrote {np.shape(A)[0]}x{np.shape(A)[1]} matrix to {path}")
