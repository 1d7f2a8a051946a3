"""Completely positive maps in Heisenberg form ``T(b) = sum_i L_i* b L_i``.

Conversions between Kraus families, Choi matrices and (column-stacking)
superoperators, plus the block-column GNS data of a CP map on M_n.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .densemat import (
    DEFAULT_TOL,
    PreconditionError,
    Tolerance,
    as_matrix,
    dag,
    min_eigenvalue,
    require_hermitian,
    unvec,
    vec,
)


class NotCompletelyPositive(ValueError):
    def __init__(self, min_eigenvalue: float):
        super().__init__(f"Choi matrix is not positive: min eigenvalue {min_eigenvalue:.3e}")
        self.min_eigenvalue = min_eigenvalue


def superop_from_kraus(kraus, n: int | None = None) -> np.ndarray:
    """Superoperator of ``b -> sum L* b L`` (uses ``vec(A X B) = (B^T kron A) vec(X)``)."""
    kraus = np.asarray(kraus, dtype=complex)
    if kraus.size == 0:
        if n is None:
            raise PreconditionError("dimension needed for an empty Kraus family")
        return np.zeros((n * n, n * n), dtype=complex)
    return sum(np.kron(k.T, dag(k)) for k in kraus)


def superop_from_callable(phi, n: int) -> np.ndarray:
    cols = []
    for k in range(n * n):
        e = np.zeros(n * n, dtype=complex)
        e[k] = 1.0
        cols.append(vec(phi(unvec(e, (n, n)))))
    return np.array(cols).T


def apply_superop(superop: np.ndarray, b) -> np.ndarray:
    b = np.asarray(b)
    return unvec(superop @ vec(b), b.shape)


def _as_superop(phi, n: int | None = None) -> np.ndarray:
    if isinstance(phi, CpMap):
        return phi.superop
    if hasattr(phi, "superop"):
        return np.asarray(phi.superop)
    if callable(phi):
        if n is None:
            raise PreconditionError("dimension needed to tabulate a callable map")
        return superop_from_callable(phi, n)
    return as_matrix(phi)


def choi_of(phi, n: int | None = None) -> np.ndarray:
    """Choi matrix ``sum_ij E_ij kron phi(E_ij)`` of a CpMap, superoperator or callable."""
    s = _as_superop(phi, n)
    d = int(round(np.sqrt(s.shape[0])))
    choi = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            # vec(E_ij) is the unit vector at j*d + i
            choi[i * d:(i + 1) * d, j * d:(j + 1) * d] = unvec(s[:, j * d + i], (d, d))
    return choi


def fix_phase(a: np.ndarray) -> np.ndarray:
    """Rotate so the largest-modulus entry (first in row-major order on ties) is real positive."""
    flat = a.reshape(-1)
    mags = np.abs(flat)
    if mags.max(initial=0.0) == 0.0:
        return a
    k = int(np.argmax(mags >= mags.max() * (1 - 1e-9)))
    return a * (abs(flat[k]) / flat[k])


def kraus_from_choi(choi, n: int, tol: Tolerance = DEFAULT_TOL) -> "CpMap":
    """Minimal Kraus family of the CP map with the given Choi matrix."""
    choi = as_matrix(choi)
    if choi.shape != (n * n, n * n):
        raise PreconditionError(f"Choi matrix of shape {choi.shape} for n = {n}")
    require_hermitian(choi, tol, "Choi matrix")
    w, v = np.linalg.eigh((choi + dag(choi)) / 2)
    top = float(np.max(np.abs(w), initial=0.0))
    if w.size and w[0] < -tol.threshold(top):
        raise NotCompletelyPositive(float(w[0]))
    keep = w > tol.threshold(top)
    ops = []
    for lam, col in sorted(zip(w[keep], v.T[keep]), key=lambda p: -p[0]):
        # eigenvector = vec(A) with phi(b) = sum A b A*, so L = A*
        ops.append(fix_phase(dag(unvec(np.sqrt(lam) * col, (n, n)))))
    return CpMap.from_kraus(ops, n)


@dataclass(frozen=True, eq=False)
class CpMap:
    """CP map on ``M_n`` given by Heisenberg-picture Kraus operators.

    ``choi`` and ``superop`` are computed once at construction.
    """

    n: int
    kraus: np.ndarray
    superop: np.ndarray = field(repr=False)
    choi: np.ndarray = field(repr=False)

    @classmethod
    def from_kraus(cls, kraus, n: int | None = None) -> "CpMap":
        kraus = np.asarray(kraus, dtype=complex)
        if kraus.ndim == 2:
            kraus = kraus[None]
        if kraus.size == 0:
            if n is None:
                raise PreconditionError("dimension needed for an empty Kraus family")
            kraus = np.zeros((0, n, n), dtype=complex)
        if n is None:
            n = kraus.shape[-1]
        if kraus.shape[1:] != (n, n):
            raise PreconditionError(f"Kraus operators of shape {kraus.shape[1:]} for n = {n}")
        s = superop_from_kraus(kraus, n)
        return cls(n=n, kraus=kraus, superop=s, choi=choi_of(s))

    @classmethod
    def from_superop(cls, superop, tol: Tolerance = DEFAULT_TOL) -> "CpMap":
        superop = as_matrix(superop)
        n = int(round(np.sqrt(superop.shape[0])))
        choi = choi_of(superop)
        fitted = kraus_from_choi(choi, n, tol)
        return cls(n=n, kraus=fitted.kraus, superop=superop, choi=choi)

    @property
    def multiplicity(self) -> int:
        return self.kraus.shape[0]

    def __call__(self, b) -> np.ndarray:
        return apply_superop(self.superop, b)

    def kraus_apply(self, b) -> np.ndarray:
        """``sum_i L_i* b L_i`` evaluated from the Kraus family."""
        b = np.asarray(b)
        return sum((dag(k) @ b @ k for k in self.kraus), np.zeros((self.n, self.n), dtype=complex))

    apply = __call__


@dataclass(frozen=True, eq=False)
class GnsData:
    """Block column ``xi = sum_i L_i (x) e_i`` in ``B(G, G (x) C^m)``."""

    multiplicity: int
    xi_blocks: np.ndarray
    minimal: bool = True

    def inner(self, b) -> np.ndarray:
        """``<xi, b xi> = sum_i L_i* b L_i``."""
        b = np.asarray(b)
        return sum((dag(x) @ b @ x for x in self.xi_blocks), np.zeros_like(b, dtype=complex))


def is_cp(phi, n: int | None = None, tol: Tolerance = DEFAULT_TOL) -> bool:
    choi = choi_of(phi, n)
    if np.linalg.norm(choi - dag(choi)) > tol.threshold(np.linalg.norm(choi)):
        return False
    return min_eigenvalue(choi) >= -tol.threshold(np.linalg.norm(choi, 2))


def is_unital(phi, n: int | None = None, tol: Tolerance = DEFAULT_TOL) -> bool:
    s = _as_superop(phi, n)
    d = int(round(np.sqrt(s.shape[0])))
    eye = np.eye(d)
    return tol.is_zero(apply_superop(s, eye) - eye, 1.0)


def gns_of(t: CpMap, tol: Tolerance = DEFAULT_TOL) -> GnsData:
    """Minimal GNS block column; ``multiplicity`` is the Choi rank."""
    minimal = kraus_from_choi(t.choi, t.n, tol)
    return GnsData(multiplicity=minimal.multiplicity, xi_blocks=minimal.kraus, minimal=True)


def compose(s: CpMap, t: CpMap) -> CpMap:
    """``b -> s(t(b))``; superoperator ``s.superop @ t.superop``."""
    if s.n != t.n:
        raise PreconditionError("compose: dimension mismatch")
    ops = [l @ k for k in s.kraus for l in t.kraus]
    return CpMap.from_kraus(ops, s.n)


def dual(t: CpMap) -> CpMap:
    """Schrodinger-picture map ``rho -> sum L rho L*`` with ``tr(dual(rho) b) = tr(rho t(b))``."""
    return CpMap.from_kraus(dag(t.kraus), t.n)


def identity_map(n: int) -> CpMap:
    return CpMap.from_kraus([np.eye(n)], n)


def random_kraus(n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((m, n, n)) + 1j * rng.standard_normal((m, n, n))) / np.sqrt(2 * n)
