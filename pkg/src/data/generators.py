"""
Seeded generators for the operator classes.

Every draw comes from a PCG64 stream keyed by SeedSequence(seed, spawn_key=(attempt,)),
so a ClassSpec reproduces the same matrix bit for bit on any platform numpy supports.
Each candidate is verified with classify() and resampled on the next attempt's stream
if verification fails.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np
import numpy.typing as npt
import scipy.linalg

from src.linalg.core import ComplexMatrix, adjoint, hermitian_part, op_norm
from src.operators.classes import ClassMembership, classify
from src.utils.config import Tolerances
from src.utils.errors import GenerationFailed

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 100


class GeneratorKind(str, Enum):
    UNITARY = "unitary"
    SYMMETRY = "symmetry"
    CONTRACTION = "contraction"
    PURE_CONTRACTION = "pure_contraction"
    PARTIAL_ISOMETRY = "partial_isometry"
    NILPOTENT = "nilpotent"
    M_QUASI_ISOMETRY = "m_quasi_isometry"
    SELF_ADJOINT_CONTRACTION = "self_adjoint_contraction"
    HERMITIAN_PLUS_PERTURBATION = "hermitian_plus_perturbation"
    NORMAL = "normal"
    SYMMETRY_PLUS_ZERO = "symmetry_plus_zero"


@dataclass(frozen=True)
class ClassSpec:
    kind: GeneratorKind
    dim: int
    seed: int
    rank: Optional[int] = None          # partial_isometry, symmetry_plus_zero
    order: Optional[int] = None         # nilpotent
    m: Optional[int] = None             # m_quasi_isometry
    epsilon: float = 0.0                # hermitian_plus_perturbation
    contractive: bool = True            # m_quasi_isometry

    def __post_init__(self):
        object.__setattr__(self, "kind", GeneratorKind(self.kind))
        if self.dim < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dim}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"seed must be a 64-bit unsigned value, got {self.seed}")
        if self.rank is not None and not 0 <= self.rank <= self.dim:
            raise ValueError(f"rank {self.rank} outside 0..{self.dim}")
        if self.order is not None and not 1 <= self.order <= self.dim:
            raise ValueError(f"nilpotent order {self.order} outside 1..{self.dim}")
        if self.m is not None and self.m < 1:
            raise ValueError(f"quasi-isometry order must be >= 1, got {self.m}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")


def stream(seed: int, attempt: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(attempt,))))


def crandn(rng: np.random.Generator, *shape: int) -> ComplexMatrix:
    """Standard complex Gaussian samples"""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def haar_unitary(n: int, rng: np.random.Generator) -> ComplexMatrix:
    """QR of a Ginibre matrix with the phases of diag(R) divided out"""
    q, r = scipy.linalg.qr(crandn(rng, n, n))
    d = np.diag(r)
    ph = d / np.abs(d)
    return q * ph


def _conjugate(core: ComplexMatrix, rng: np.random.Generator) -> ComplexMatrix:
    W = haar_unitary(core.shape[0], rng)
    return W @ core @ adjoint(W)


def _nilpotent_core(n: int, order: int, rng: np.random.Generator) -> ComplexMatrix:
    """Strictly upper bidiagonal; the superdiagonal is cut every `order` steps"""
    N = np.zeros((n, n), dtype=np.complex128)
    for i in range(n - 1):
        if (i + 1) % order:
            N[i, i + 1] = rng.uniform(0.5, 1.5) * np.exp(2j * np.pi * rng.uniform())
    return N


def _build(spec: ClassSpec, rng: np.random.Generator) -> ComplexMatrix:
    n = spec.dim
    kind = spec.kind
    if kind is GeneratorKind.UNITARY:
        return haar_unitary(n, rng)
    if kind is GeneratorKind.SYMMETRY:
        signs = rng.choice([-1.0, 1.0], size=n)
        return hermitian_part(_conjugate(np.diag(signs).astype(np.complex128), rng))
    if kind in (GeneratorKind.CONTRACTION, GeneratorKind.PURE_CONTRACTION):
        G = crandn(rng, n, n)
        target = 1.0 if kind is GeneratorKind.CONTRACTION else 0.9
        return target * G / op_norm(G)
    if kind is GeneratorKind.PARTIAL_ISOMETRY:
        r = spec.rank if spec.rank is not None else max(n // 2, 1)
        U, V = haar_unitary(n, rng), haar_unitary(n, rng)
        return U[:, :r] @ adjoint(V[:, :r])
    if kind is GeneratorKind.NILPOTENT:
        order = spec.order if spec.order is not None else min(2, n)
        N = _conjugate(_nilpotent_core(n, order, rng), rng)
        norm = op_norm(N)
        return N / norm if norm > 0 else N
    if kind is GeneratorKind.M_QUASI_ISOMETRY:
        return _quasi_isometry(spec, rng)
    if kind is GeneratorKind.SELF_ADJOINT_CONTRACTION:
        lam = rng.uniform(-1.0, 1.0, size=n)
        return hermitian_part(_conjugate(np.diag(lam).astype(np.complex128), rng))
    if kind is GeneratorKind.HERMITIAN_PLUS_PERTURBATION:
        lam = rng.uniform(-1.0, 1.0, size=n)
        H = hermitian_part(_conjugate(np.diag(lam).astype(np.complex128), rng))
        return perturb(H, spec.epsilon, int(rng.integers(0, 2 ** 63)))
    if kind is GeneratorKind.NORMAL:
        radius = np.sqrt(rng.uniform(0.0, 1.0, size=n))
        z = radius * np.exp(2j * np.pi * rng.uniform(size=n))
        return _conjugate(np.diag(z), rng)
    if kind is GeneratorKind.SYMMETRY_PLUS_ZERO:
        k = spec.rank if spec.rank is not None else int(rng.integers(1, n + 1))
        signs = np.concatenate([rng.choice([-1.0, 1.0], size=k), np.zeros(n - k)])
        return hermitian_part(_conjugate(np.diag(signs).astype(np.complex128), rng))
    raise ValueError(f"unknown generator kind {kind}")


def _quasi_isometry(spec: ClassSpec, rng: np.random.Generator) -> ComplexMatrix:
    """
    [[U, R], [0, Q]] with U unitary and Q nilpotent of index <= m, conjugated.

    T^m has range inside the first block, where T acts as U, so any R gives an
    m-quasi-isometry; the contractive variant takes R = 0 and ||Q|| < 1.
    """
    n = spec.dim
    m = spec.m if spec.m is not None else 2
    u_dim = int(rng.integers(1, n)) if n > 1 else 1
    q_dim = n - u_dim
    core = np.zeros((n, n), dtype=np.complex128)
    core[:u_dim, :u_dim] = haar_unitary(u_dim, rng)
    if q_dim:
        Q = _nilpotent_core(q_dim, min(m, q_dim), rng)
        norm = op_norm(Q)
        if norm > 0:
            Q *= rng.uniform(0.3, 0.9) / norm
        core[u_dim:, u_dim:] = Q
        if not spec.contractive:
            core[:u_dim, u_dim:] = crandn(rng, u_dim, q_dim)
    return _conjugate(core, rng)


def _verified(spec: ClassSpec, T: ComplexMatrix, c: ClassMembership) -> bool:
    kind = spec.kind
    if kind is GeneratorKind.UNITARY:
        return c.unitary.holds
    if kind is GeneratorKind.SYMMETRY:
        return c.symmetry.holds
    if kind is GeneratorKind.CONTRACTION:
        return c.contraction.holds
    if kind is GeneratorKind.PURE_CONTRACTION:
        return c.pure_contraction.holds
    if kind is GeneratorKind.PARTIAL_ISOMETRY:
        r = spec.rank if spec.rank is not None else max(spec.dim // 2, 1)
        trace = float(np.real(np.trace(adjoint(T) @ T)))
        return c.partial_isometry.holds and abs(trace - r) < 1e-6
    if kind is GeneratorKind.NILPOTENT:
        return c.nilpotent_order == (spec.order if spec.order is not None else min(2, spec.dim))
    if kind is GeneratorKind.M_QUASI_ISOMETRY:
        m = spec.m if spec.m is not None else 2
        return c.m_quasi_isometry[m].holds and (c.contraction.holds or not spec.contractive)
    if kind is GeneratorKind.SELF_ADJOINT_CONTRACTION:
        return c.self_adjoint.holds and c.contraction.holds
    if kind is GeneratorKind.NORMAL:
        return c.normal.holds and c.contraction.holds
    if kind is GeneratorKind.SYMMETRY_PLUS_ZERO:
        return c.self_adjoint.holds and c.partial_isometry.holds
    return True


def generate(spec: ClassSpec, tol: Optional[Tolerances] = None) -> ComplexMatrix:
    tol = tol or Tolerances()
    m_list = [spec.m if spec.m is not None else 2] if spec.kind is GeneratorKind.M_QUASI_ISOMETRY else []
    for attempt in range(MAX_ATTEMPTS):
        T = np.asarray(_build(spec, stream(spec.seed, attempt)), dtype=np.complex128)
        if _verified(spec, T, classify(T, m_list, tol)):
            if attempt:
                logger.warning(f"{spec.kind.value} dim={spec.dim} seed={spec.seed} accepted after {attempt + 1} attempts")
            return T
        logger.debug(f"{spec.kind.value} candidate {attempt} failed verification, resampling")
    raise GenerationFailed(spec.kind.value, MAX_ATTEMPTS)


def perturb(T: ComplexMatrix, epsilon: float, seed: int) -> ComplexMatrix:
    """T + epsilon G with G complex Gaussian, ||G||_F = 1"""
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    T = np.asarray(T, dtype=np.complex128)
    if epsilon == 0:
        return T.copy()
    G = crandn(stream(seed), *T.shape)
    return T + epsilon * G / np.linalg.norm(G, "fro")


def paper_example_41(half_dim: int) -> Tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
    """T = [[0, I], [0, 0]] and U = [[0, I], [I, 0]] in exact integers"""
    if half_dim < 1:
        raise ValueError(f"half_dim must be >= 1, got {half_dim}")
    I = np.eye(half_dim, dtype=np.int64)
    Z = np.zeros((half_dim, half_dim), dtype=np.int64)
    T = np.block([[Z, I], [Z, Z]])
    U = np.block([[Z, I], [I, Z]])
    return T, U
