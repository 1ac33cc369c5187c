"""Dense complex linear-algebra kernel.

Everything here is a pure function over immutable complex128 arrays;
results are safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.linalg

from .errors import DimensionMismatchError

HERM_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10


def as_complex_matrix(a) -> np.ndarray:
    """Coerce to a finite 2-d complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionMismatchError(f"expected a 2-d array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains NaN or Inf entries")
    return m


def frozen(a: np.ndarray) -> np.ndarray:
    """Return a read-only view-owning copy of ``a``."""
    out = np.array(a)
    out.setflags(write=False)
    return out


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a).conj().T


def kron(a, b) -> np.ndarray:
    """Kronecker product of two matrices."""
    return np.kron(as_complex_matrix(a), as_complex_matrix(b))


def kron_all(mats) -> np.ndarray:
    """Kronecker product of a sequence of matrices, left to right."""
    return reduce(kron, mats)


def hadamard_product(a, b) -> np.ndarray:
    """Entrywise product; operands must have identical shapes."""
    a = as_complex_matrix(a)
    b = as_complex_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch {a.shape} vs {b.shape}")
    return a * b


def partial_trace_first(m, dim_a: int, dim_b: int) -> np.ndarray:
    """Trace out the leading ``dim_a``-dimensional factor of a bipartite matrix."""
    m = as_complex_matrix(m)
    n = dim_a * dim_b
    if m.shape != (n, n):
        raise DimensionMismatchError(
            f"matrix side {m.shape[0]} != dim_a*dim_b = {n}"
        )
    return np.einsum("ijik->jk", m.reshape(dim_a, dim_b, dim_a, dim_b))


def expm(a) -> np.ndarray:
    """Matrix exponential (Pade with scaling and squaring)."""
    a = as_complex_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expm needs a square matrix, got {a.shape}")
    return scipy.linalg.expm(a)


def is_unitary(u, tol: float = 1e-9) -> bool:
    u = as_complex_matrix(u)
    if u.shape[0] != u.shape[1]:
        return False
    return np.max(np.abs(u @ dagger(u) - np.eye(u.shape[0]))) <= tol


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive-semidefinite, trace-one complex matrix.

    Invariants are checked on construction: Hermiticity defect below
    ``HERM_TOL``, trace within ``TRACE_TOL`` of one, smallest eigenvalue
    above ``-PSD_TOL``.
    """

    mat: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.mat)
        if m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"density matrix must be square, got {m.shape}")
        herm = np.max(np.abs(m - dagger(m)))
        if herm > HERM_TOL:
            raise ValueError(f"Hermiticity defect {herm:.3e} exceeds {HERM_TOL:.0e}")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr} deviates from 1 by more than {TRACE_TOL:.0e}")
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < -PSD_TOL:
            raise ValueError(f"smallest eigenvalue {lo:.3e} below -{PSD_TOL:.0e}")
        object.__setattr__(self, "mat", frozen(m))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @staticmethod
    def pure(vec) -> "DensityMatrix":
        """Projector onto a state vector (renormalized)."""
        v = np.asarray(vec, dtype=np.complex128).ravel()
        nrm = np.linalg.norm(v)
        if nrm == 0.0:
            raise ValueError("cannot build a projector from the zero vector")
        v = v / nrm
        return DensityMatrix(np.outer(v, v.conj()))

    @staticmethod
    def maximally_mixed(dim: int) -> "DensityMatrix":
        return DensityMatrix(np.eye(dim, dtype=np.complex128) / dim)

    def diagonal(self) -> np.ndarray:
        """Real part of the diagonal, clamped at zero."""
        return np.maximum(np.real(np.diag(self.mat)), 0.0)


def symmetrize(m: np.ndarray) -> np.ndarray:
    """Average a matrix with its conjugate transpose."""
    return 0.5 * (m + dagger(m))
