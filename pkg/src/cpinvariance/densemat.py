"""Dense complex matrix kernel and the shared tolerance policy.

Matrices are plain ``numpy.ndarray`` objects.  Superoperators use the
column-stacking convention throughout the package::

    vec([[a, b],
         [c, d]]) = (a, c, b, d)

so that ``vec(A @ X @ B) == kron(B.T, A) @ vec(X)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg


class PreconditionError(ValueError):
    """An operation was called on input outside its domain."""


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative zero test: ``|x| <= abs_eps + rel_eps * scale``."""

    abs_eps: float = 1e-10
    rel_eps: float = 1e-10

    def __post_init__(self):
        if self.abs_eps < 0 or self.rel_eps < 0:
            raise ValueError("tolerances must be nonnegative")

    def threshold(self, scale: float = 0.0) -> float:
        return self.abs_eps + self.rel_eps * float(scale)

    def is_zero(self, x, scale: float = 0.0) -> bool:
        return float(np.max(np.abs(x), initial=0.0)) <= self.threshold(scale)

    @classmethod
    def uniform(cls, eps: float) -> "Tolerance":
        return cls(abs_eps=eps, rel_eps=eps)


DEFAULT_TOL = Tolerance()


def as_matrix(a, dtype=complex) -> np.ndarray:
    a = np.asarray(a, dtype=dtype)
    if a.ndim != 2:
        raise PreconditionError(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def dag(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product ``tr(a* b)``."""
    return complex(np.vdot(a, b))


def vec(a: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(a).reshape(-1, order="F")


def unvec(v: np.ndarray, shape: tuple[int, int] | None = None) -> np.ndarray:
    v = np.asarray(v)
    if shape is None:
        d = int(round(np.sqrt(v.size)))
        if d * d != v.size:
            raise PreconditionError(f"cannot unvec a vector of length {v.size} into a square")
        shape = (d, d)
    return v.reshape(shape, order="F")


def matrix_units(n: int) -> np.ndarray:
    """All ``E_ij`` as an array of shape (n, n, n, n), ``units[i, j] = E_ij``."""
    units = np.zeros((n, n, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            units[i, j, i, j] = 1.0
    return units


def hermitian_distance(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - dag(a)))


def require_hermitian(a: np.ndarray, tol: Tolerance = DEFAULT_TOL, what: str = "matrix") -> None:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise PreconditionError(f"{what} must be square, got shape {a.shape}")
    dist = hermitian_distance(a)
    if dist > tol.threshold(np.linalg.norm(a)):
        raise PreconditionError(f"{what} is not Hermitian: ||a - a*||_F = {dist:.3e}")


def eig_hermitian(a, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and a unitary of eigenvectors of a Hermitian matrix."""
    a = as_matrix(a)
    require_hermitian(a, tol)
    return np.linalg.eigh((a + dag(a)) / 2)


def lstsq_min_norm(a, b) -> tuple[np.ndarray, float]:
    """Minimum-norm least-squares solution of ``a x = b`` and its residual norm."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[0] != b.shape[0]:
        raise PreconditionError(f"row mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        shape = (a.shape[1],) + b.shape[1:]
        return np.zeros(shape, dtype=np.result_type(a, b)), float(np.linalg.norm(b))
    x, *_ = np.linalg.lstsq(a, b, rcond=None)
    return x, float(np.linalg.norm(a @ x - b))


def numerical_rank(values: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> int:
    """Count values above ``tol`` relative to the largest one."""
    values = np.abs(np.asarray(values))
    if values.size == 0:
        return 0
    top = float(values.max())
    return int(np.sum(values > tol.threshold(top)))


def nullspace(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical kernel of ``a``."""
    a = np.asarray(a)
    rows, cols = a.shape
    if rows == 0 or cols == 0:
        return np.eye(cols, dtype=a.dtype if np.iscomplexobj(a) else float)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    rank = numerical_rank(s, tol) if s.size and s.max() > tol.abs_eps else 0
    return dag(vh[rank:])


def orthonormal_span(vectors, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the span of the given column vectors."""
    vectors = np.asarray(vectors)
    if vectors.size == 0:
        return np.zeros((vectors.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    rank = numerical_rank(s, tol) if s.max() > tol.abs_eps else 0
    return u[:, :rank]


def min_eigenvalue(a) -> float:
    a = np.asarray(a)
    return float(np.linalg.eigvalsh((a + dag(a)) / 2)[0])


def is_psd(a, tol: Tolerance = DEFAULT_TOL) -> bool:
    a = as_matrix(a)
    require_hermitian(a, tol)
    if a.size == 0:
        return True
    return min_eigenvalue(a) >= -tol.threshold(np.linalg.norm(a, 2))


def is_normal(a, tol: Tolerance = DEFAULT_TOL) -> bool:
    return tol.is_zero(commutator(a, dag(a)), np.linalg.norm(a) ** 2)


def expm(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Matrix exponential.

    Normal inputs go through a unitary eigendecomposition; everything else
    uses scaling and squaring with a Pade approximant.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise PreconditionError(f"expm needs a square matrix, got {a.shape}")
    if is_normal(a, tol):
        if hermitian_distance(a) <= tol.threshold(np.linalg.norm(a)):
            w, v = np.linalg.eigh((a + dag(a)) / 2)
            return (v * np.exp(w)) @ dag(v)
        # complex Schur form of a normal matrix is diagonal
        t, z = scipy.linalg.schur(a, output="complex")
        return (z * np.exp(np.diag(t))) @ dag(z)
    return scipy.linalg.expm(a)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_complex(shape, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    z = random_complex((n, n), rng)
    return (z + dag(z)) / 2
