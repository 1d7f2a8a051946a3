"""Unital *-subalgebras of M_n stored as Hilbert-Schmidt orthonormal spans."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .densemat import (
    DEFAULT_TOL,
    PreconditionError,
    Tolerance,
    as_matrix,
    commutator,
    dag,
    eig_hermitian,
    nullspace,
    orthonormal_span,
)


@dataclass(frozen=True, eq=False)
class StarAlgebra:
    """A unital *-subalgebra of ``M_n``.

    ``basis`` has shape ``(dim, n, n)`` and is orthonormal for ``tr(a* b)``.
    """

    n: int
    basis: np.ndarray
    generators: tuple = field(default=(), repr=False)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def _flat(self) -> np.ndarray:
        return self.basis.reshape(self.dim, -1)

    def coefficients(self, x) -> np.ndarray:
        return np.conj(self._flat()) @ np.asarray(x).reshape(-1)

    def project(self, x) -> np.ndarray:
        return np.tensordot(self.coefficients(x), self.basis, axes=1)

    def distance(self, x) -> float:
        """Frobenius distance from ``x`` to the span."""
        x = np.asarray(x)
        return float(np.linalg.norm(x - self.project(x)))

    def contains(self, x, tol: Tolerance = DEFAULT_TOL) -> bool:
        return self.distance(x) <= tol.threshold(np.linalg.norm(x))

    def contains_algebra(self, other: "StarAlgebra", tol: Tolerance = DEFAULT_TOL) -> bool:
        return all(self.contains(b, tol) for b in other.basis)

    def same_span(self, other: "StarAlgebra", tol: Tolerance = DEFAULT_TOL) -> bool:
        return (
            self.n == other.n
            and self.dim == other.dim
            and self.contains_algebra(other, tol)
            and other.contains_algebra(self, tol)
        )

    def is_commutative(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        return all(
            tol.is_zero(commutator(a, b), 1.0)
            for i, a in enumerate(self.basis)
            for b in self.basis[i + 1:]
        )

    def closure_defects(self) -> dict[str, float]:
        """Largest distance to the span of 1, of b*, and of b b' over basis elements."""
        eye = np.eye(self.n)
        star = max((self.distance(dag(b)) for b in self.basis), default=0.0)
        prod = max(
            (self.distance(a @ b) for a in self.basis for b in self.basis), default=0.0
        )
        return {"identity": self.distance(eye), "adjoint": star, "product": prod}


def _span_of(mats, n: int, tol: Tolerance) -> np.ndarray:
    mats = np.asarray(mats, dtype=complex).reshape(-1, n * n)
    cols = orthonormal_span(mats.T, tol)
    return cols.T.reshape(-1, n, n)


def span_closure(generators, n: int, tol: Tolerance = DEFAULT_TOL) -> StarAlgebra:
    """Smallest unital *-algebra containing ``generators``.

    Grows the span of words in the generators and their adjoints until the
    dimension stops increasing (at most n^2 rounds).
    """
    gens = [as_matrix(g) for g in generators]
    for g in gens:
        if g.shape != (n, n):
            raise PreconditionError(f"generator of shape {g.shape} in M_{n}")
    letters = gens + [dag(g) for g in gens]
    basis = _span_of([np.eye(n)], n, tol)
    while True:
        words = [b @ g for b in basis for g in letters]
        grown = _span_of(list(basis) + words, n, tol)
        if grown.shape[0] == basis.shape[0]:
            break
        basis = grown
    return StarAlgebra(n=n, basis=basis, generators=tuple(gens))


def full_algebra(n: int) -> StarAlgebra:
    units = np.zeros((n * n, n, n), dtype=complex)
    for k in range(n * n):
        units[k, k // n, k % n] = 1.0
    return StarAlgebra(n=n, basis=units, generators=())


def block_algebra(sizes) -> StarAlgebra:
    """Block-diagonal algebra ``M_{s1} + M_{s2} + ...`` in standard position."""
    n = int(sum(sizes))
    units = []
    offset = 0
    for s in sizes:
        for i in range(s):
            for j in range(s):
                e = np.zeros((n, n), dtype=complex)
                e[offset + i, offset + j] = 1.0
                units.append(e)
        offset += s
    return StarAlgebra(n=n, basis=np.array(units), generators=())


def commutant(s: StarAlgebra, ambient: StarAlgebra, tol: Tolerance = DEFAULT_TOL) -> StarAlgebra:
    """``{x in ambient : [x, b] = 0 for every b in s}``."""
    if s.n != ambient.n:
        raise PreconditionError("algebras live in different dimensions")
    if not ambient.contains_algebra(s, tol):
        raise PreconditionError("commutant: s is not contained in the ambient algebra")
    n = s.n
    # column j of the constraint block for g: vec([a_j, g]) with a_j the ambient basis
    blocks = [
        np.stack([commutator(a, g).reshape(-1) for a in ambient.basis], axis=1)
        for g in s.basis
    ]
    constraints = np.vstack(blocks) if blocks else np.zeros((0, ambient.dim))
    coeffs = nullspace(constraints, tol)
    basis = np.tensordot(coeffs.T, ambient.basis, axes=1).reshape(-1, n, n)
    return StarAlgebra(n=n, basis=basis, generators=tuple(s.basis))


@dataclass(frozen=True, eq=False)
class CommutativeSubalgebra:
    """Commutative *-algebra with its minimal projections and a diagonalizer.

    Every element is ``U @ diag(.) @ U*`` with ``U = diagonalizer``; the
    projections are mutually orthogonal and sum to the identity.
    ``non_unique`` marks a maximal refinement chosen from degenerate data.
    """

    algebra: StarAlgebra
    diagonalizer: np.ndarray
    projections: np.ndarray
    non_unique: bool = False

    @property
    def n(self) -> int:
        return self.algebra.n

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def coefficients(self, x) -> np.ndarray:
        """Coefficients of ``x`` over the minimal projections (exact when ``x`` lies in C)."""
        x = np.asarray(x)
        return np.array([np.trace(p @ x) / np.trace(p).real for p in self.projections])

    def element(self, coeffs) -> np.ndarray:
        return np.tensordot(np.asarray(coeffs), self.projections, axes=1)

    def contains(self, x, tol: Tolerance = DEFAULT_TOL) -> bool:
        return self.algebra.contains(x, tol)

    def distance(self, x) -> float:
        return self.algebra.distance(x)


def _group_spectrum(w: np.ndarray, tol: Tolerance) -> list[list[int]]:
    scale = float(np.max(np.abs(w), initial=0.0))
    gap = tol.threshold(scale) * 1e3
    groups = [[0]]
    for k in range(1, len(w)):
        if w[k] - w[groups[-1][-1]] > gap:
            groups.append([k])
        else:
            groups[-1].append(k)
    return groups


def _projections_from(v: np.ndarray, groups) -> np.ndarray:
    return np.array([v[:, g] @ dag(v[:, g]) for g in groups])


def joint_diagonalize(
    algebra: StarAlgebra, tol: Tolerance = DEFAULT_TOL, seed: int = 0, retries: int = 8
) -> CommutativeSubalgebra:
    """Jointly diagonalize a commutative algebra via one random Hermitian combination.

    Retries with a fresh draw when the eigenvalue grouping does not produce
    exactly ``dim`` projections inside the algebra.
    """
    if not algebra.is_commutative(tol):
        raise PreconditionError("algebra is not commutative")
    rng = np.random.default_rng(seed)
    herm = np.array([(b + dag(b)) / 2 for b in algebra.basis] + [(b - dag(b)) / 2j for b in algebra.basis])
    for _ in range(retries):
        weights = rng.standard_normal(len(herm))
        h = np.tensordot(weights, herm, axes=1)
        w, v = np.linalg.eigh(h)
        groups = _group_spectrum(w, tol)
        if len(groups) != algebra.dim:
            continue
        projs = _projections_from(v, groups)
        if all(algebra.contains(p, Tolerance.uniform(1e-8)) for p in projs):
            return CommutativeSubalgebra(algebra, v, projs)
    raise PreconditionError("could not separate the joint eigenspaces of the algebra")


def diagonal_masa(n: int) -> CommutativeSubalgebra:
    return masa_in_basis(np.eye(n, dtype=complex))


def masa_in_basis(u, non_unique: bool = False) -> CommutativeSubalgebra:
    """Diagonal algebra in the orthonormal basis formed by the columns of ``u``."""
    u = as_matrix(u)
    n = u.shape[0]
    if not np.allclose(dag(u) @ u, np.eye(n), atol=1e-9):
        raise PreconditionError("basis matrix is not unitary")
    projs = np.array([np.outer(u[:, k], np.conj(u[:, k])) for k in range(n)])
    alg = StarAlgebra(n=n, basis=projs.copy(), generators=tuple(projs))
    return CommutativeSubalgebra(alg, u, projs, non_unique)


def masa_from_hermitian(c, tol: Tolerance = DEFAULT_TOL) -> CommutativeSubalgebra:
    """Maximal abelian algebra diagonal in an eigenbasis of ``c``.

    With a degenerate spectrum the eigenbasis (hence the algebra) is not
    determined by ``c`` and the result is flagged ``non_unique``.
    """
    c = as_matrix(c)
    w, v = eig_hermitian(c, tol)
    degenerate = len(_group_spectrum(w, tol)) < len(w)
    return masa_in_basis(v, non_unique=degenerate)


def from_generators(generators, n: int, tol: Tolerance = DEFAULT_TOL, seed: int = 0) -> CommutativeSubalgebra:
    return joint_diagonalize(span_closure(generators, n, tol), tol, seed)


def minimal_projections(
    c: CommutativeSubalgebra | StarAlgebra, tol: Tolerance = DEFAULT_TOL, seed: int = 0
) -> list[np.ndarray]:
    if isinstance(c, StarAlgebra):
        c = joint_diagonalize(c, tol, seed)
    return list(c.projections)


def is_maximal_commutative(
    c: CommutativeSubalgebra | StarAlgebra, ambient: StarAlgebra, tol: Tolerance = DEFAULT_TOL
) -> bool:
    alg = c.algebra if isinstance(c, CommutativeSubalgebra) else c
    if not alg.is_commutative(tol):
        return False
    return commutant(alg, ambient, tol).same_span(alg, tol)
