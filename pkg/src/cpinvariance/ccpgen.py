"""Conditionally completely positive generators: CCP test, Lindblad and
Christensen-Evans forms, and the Gram matrix of the derivation module."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cpmap import CpMap, apply_superop, choi_of, fix_phase, superop_from_kraus
from .densemat import (
    DEFAULT_TOL,
    PreconditionError,
    Tolerance,
    as_matrix,
    dag,
    min_eigenvalue,
    nullspace,
    unvec,
    vec,
)


class NotConditionallyCompletelyPositive(ValueError):
    def __init__(self, min_eigenvalue: float, what: str = "projected Choi matrix"):
        super().__init__(f"{what} is not positive: min eigenvalue {min_eigenvalue:.3e}")
        self.min_eigenvalue = min_eigenvalue


@dataclass(frozen=True, eq=False)
class CcpGenerator:
    """A Hermiticity-preserving linear map on ``M_n`` stored as a superoperator."""

    n: int
    superop: np.ndarray = field(repr=False)

    @classmethod
    def from_superop(cls, superop, tol: Tolerance = DEFAULT_TOL) -> "CcpGenerator":
        superop = as_matrix(superop)
        n = int(round(np.sqrt(superop.shape[0])))
        if superop.shape != (n * n, n * n):
            raise PreconditionError(f"superoperator of shape {superop.shape} is not n^2 x n^2")
        g = cls(n=n, superop=superop)
        choi = g.choi
        if np.linalg.norm(choi - dag(choi)) > tol.threshold(np.linalg.norm(choi)):
            raise PreconditionError("generator is not Hermiticity-preserving")
        return g

    @classmethod
    def from_cp(cls, t: CpMap) -> "CcpGenerator":
        return cls(n=t.n, superop=t.superop)

    @classmethod
    def zero(cls, n: int) -> "CcpGenerator":
        return cls(n=n, superop=np.zeros((n * n, n * n), dtype=complex))

    @classmethod
    def hamiltonian(cls, h) -> "CcpGenerator":
        """``b -> i[b, h]``."""
        return assemble_lindblad(LindbladForm(h=as_matrix(h), kraus=np.zeros((0,) + np.shape(h))))

    @property
    def choi(self) -> np.ndarray:
        return choi_of(self.superop)

    def __call__(self, b) -> np.ndarray:
        return apply_superop(self.superop, b)

    apply = __call__

    def __add__(self, other: "CcpGenerator") -> "CcpGenerator":
        return CcpGenerator(self.n, self.superop + other.superop)

    def scaled(self, t: float) -> "CcpGenerator":
        return CcpGenerator(self.n, t * self.superop)


@dataclass(frozen=True, eq=False)
class LindbladForm:
    """``L(b) = i[b, h] + sum_i (L_i* b L_i - {L_i* L_i, b}/2) + (b s + s b)``.

    ``offset`` is ``s = L(1)/2``; it is zero exactly for Markov generators.
    """

    h: np.ndarray
    kraus: np.ndarray
    offset: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.h.shape[0]


@dataclass(frozen=True, eq=False)
class CeForm:
    """``L(b) = L0(b) + b beta + beta* b`` with ``L0`` completely positive."""

    cp_part: CpMap
    beta: np.ndarray


@dataclass(frozen=True, eq=False)
class CcpGnsGram:
    dim: int
    gram: np.ndarray = field(repr=False)
    rank: int


def omega(n: int) -> np.ndarray:
    """``sum_i e_i (x) e_i``; equals ``vec(I)`` in the column-stacking convention."""
    return vec(np.eye(n, dtype=complex))


def projected_choi(g: CcpGenerator) -> np.ndarray:
    n = g.n
    w = omega(n)
    p = np.eye(n * n) - np.outer(w, w) / n
    return p @ g.choi @ p


def ccp_margin(g: CcpGenerator) -> float:
    """Smallest eigenvalue of the projected Choi matrix."""
    return min_eigenvalue(projected_choi(g))


def is_ccp(g: CcpGenerator, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Conditional complete positivity via ``P C P >= 0``, ``P`` killing ``vec(I)``."""
    choi = g.choi
    if np.linalg.norm(choi - dag(choi)) > tol.threshold(np.linalg.norm(choi)):
        raise PreconditionError("generator is not Hermiticity-preserving")
    pcp = projected_choi(g)
    return min_eigenvalue(pcp) >= -tol.threshold(np.linalg.norm(pcp, 2))


def ccp_oracle_min(g: CcpGenerator, trials: int = 1000, seed: int = 0) -> float:
    """Smallest value of the defining CCP quadratic form found over random samples.

    Each trial draws unit-norm ``a_1..a_k`` (``k <= n^2``) and minimizes
    ``sum_ij b_i* L(a_i* a_j) b_j`` over tuples with ``sum_i a_i b_i = 0``.
    Pairing with a unit vector ``psi`` only sees ``x_i = b_i psi``, and any
    ``x`` with ``sum a_i x_i = 0`` is reached by ``b_i = x_i psi*``, so the
    minimum is the least eigenvalue of the compressed block matrix.
    """
    n = g.n
    rng = np.random.default_rng(seed)
    best = np.inf
    for _ in range(trials):
        k = int(rng.integers(2, n * n + 1))
        a = rng.standard_normal((k, n, n)) + 1j * rng.standard_normal((k, n, n))
        a /= np.linalg.norm(a, axis=(1, 2), keepdims=True)
        prods = np.einsum("iba,jbc->ijac", a.conj(), a)  # a_i* a_j
        flat = prods.transpose(0, 1, 3, 2).reshape(k * k, n * n)  # column-stacked vecs
        images = (flat @ g.superop.T).reshape(k, k, n, n).transpose(0, 1, 3, 2)
        form = images.transpose(0, 2, 1, 3).reshape(k * n, k * n)
        constraint = np.concatenate(list(a), axis=1)
        ker = nullspace(constraint)
        if ker.shape[1] == 0:
            continue
        best = min(best, min_eigenvalue(dag(ker) @ form @ ker))
    return float(best)


def ccp_bruteforce_oracle(
    g: CcpGenerator, trials: int = 1000, seed: int = 0, tol: Tolerance = DEFAULT_TOL
) -> bool:
    if trials <= 0:
        return True
    return ccp_oracle_min(g, trials, seed) >= -tol.threshold(np.linalg.norm(g.superop, 2))


def is_markov_generator(g: CcpGenerator, tol: Tolerance = DEFAULT_TOL) -> bool:
    return is_ccp(g, tol) and tol.is_zero(g(np.eye(g.n)), np.linalg.norm(g.superop, 2))


def _sandwich_terms(kraus, n: int) -> tuple[np.ndarray, np.ndarray]:
    kraus = np.asarray(kraus, dtype=complex).reshape(-1, n, n)
    k = sum((dag(l) @ l for l in kraus), np.zeros((n, n), dtype=complex))
    return superop_from_kraus(kraus, n), k


def _right_mult(x: np.ndarray) -> np.ndarray:
    """Superoperator of ``b -> b x``."""
    return np.kron(x.T, np.eye(x.shape[0]))


def _left_mult(x: np.ndarray) -> np.ndarray:
    """Superoperator of ``b -> x b``."""
    return np.kron(np.eye(x.shape[0]), x)


def assemble_lindblad(f: LindbladForm) -> CcpGenerator:
    n = f.n
    h = as_matrix(f.h)
    cp, k = _sandwich_terms(f.kraus, n)
    s = cp - 0.5 * (_right_mult(k) + _left_mult(k)) + 1j * (_right_mult(h) - _left_mult(h))
    if f.offset is not None:
        s = s + _right_mult(f.offset) + _left_mult(f.offset)
    return CcpGenerator(n, s)


def assemble_ce(c: CeForm) -> CcpGenerator:
    beta = as_matrix(c.beta)
    return CcpGenerator(c.cp_part.n, c.cp_part.superop + _right_mult(beta) + _left_mult(dag(beta)))


def ce_from_lindblad(f: LindbladForm) -> CeForm:
    """``beta = -sum L_i* L_i / 2 + i h`` (plus the offset for non-Markov forms)."""
    n = f.n
    _, k = _sandwich_terms(f.kraus, n)
    beta = -0.5 * k + 1j * as_matrix(f.h)
    if f.offset is not None:
        beta = beta + f.offset
    return CeForm(cp_part=CpMap.from_kraus(f.kraus, n), beta=beta)


def _beta_of_remainder(d: CcpGenerator) -> np.ndarray:
    """Recover ``beta`` from ``D(b) = b beta + beta* b``, gauge ``tr beta`` real.

    ``(1/n) sum_ij E_ji D(E_ij) = beta + conj(tr beta)/n``.
    """
    n = d.n
    m = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = 1.0
            m += e.T @ d(e)
    m /= n
    tr_beta = np.trace(m).real / 2
    return m - tr_beta / n * np.eye(n)


def lindblad_decompose(g: CcpGenerator, tol: Tolerance = DEFAULT_TOL) -> LindbladForm:
    """Canonical Lindblad form with ``tr h = 0`` and traceless ``L_i``.

    The ``L_i`` come from the eigen-decomposition of the Choi matrix
    compressed to the complement of ``vec(I)``.
    """
    n = g.n
    pcp = projected_choi(g)
    w, v = np.linalg.eigh((pcp + dag(pcp)) / 2)
    top = float(np.max(np.abs(w), initial=0.0))
    if w.size and w[0] < -tol.threshold(top):
        raise NotConditionallyCompletelyPositive(float(w[0]))
    keep = w > tol.threshold(top)
    ops = [
        fix_phase(dag(unvec(np.sqrt(lam) * col, (n, n))))
        for lam, col in sorted(zip(w[keep], v.T[keep]), key=lambda p: -p[0])
    ]
    kraus = np.array(ops, dtype=complex).reshape(-1, n, n)
    cp, k = _sandwich_terms(kraus, n)
    beta = _beta_of_remainder(CcpGenerator(n, g.superop - cp))
    h = (beta - dag(beta)) / 2j
    h = (h + dag(h)) / 2
    h -= np.trace(h).real / n * np.eye(n)
    offset = (beta + dag(beta)) / 2 + 0.5 * k
    scale = max(np.linalg.norm(g.superop, 2), 1.0)
    if tol.is_zero(offset, scale):
        offset = None
    if tol.is_zero(h, scale):
        h = np.zeros((n, n), dtype=complex)
    return LindbladForm(h=h, kraus=kraus, offset=offset)


def derivation_blocks(kraus, b) -> np.ndarray:
    """``d(b) = b zeta - zeta b`` blockwise for ``zeta = sum L_i (x) e_i``."""
    kraus = np.asarray(kraus)
    return np.array([b @ l - l @ b for l in kraus]).reshape(kraus.shape)


def derivation_identity_check(g: CcpGenerator, f: LindbladForm) -> float:
    """Max deviation of ``<d(b), d(b')>`` from
    ``L(b* b') - L(b*) b' - b* L(b') + b* L(1) b'`` over matrix-unit pairs."""
    n = g.n
    eye = np.eye(n)
    l1 = g(eye)
    units = []
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = 1.0
            units.append(e)
    kraus = np.asarray(f.kraus, dtype=complex).reshape(-1, n, n)
    derivs = [derivation_blocks(kraus, b) for b in units]
    worst = 0.0
    for b, db in zip(units, derivs):
        bs = dag(b)
        lbs = g(bs)
        for b2, db2 in zip(units, derivs):
            lhs = sum((dag(x) @ y for x, y in zip(db, db2)), np.zeros((n, n), dtype=complex))
            rhs = g(bs @ b2) - lbs @ b2 - bs @ g(b2) + bs @ l1 @ b2
            worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


def gns_gram(g: CcpGenerator, tol: Tolerance = DEFAULT_TOL) -> CcpGnsGram:
    """Gram matrix of ``<a (x) b, a' (x) b'> = b* L(a* a') b'`` on ``(B (x) B)_0``.

    Scalars come from the normalized trace; on matrix units the entry is
    ``delta_aa' delta_dd' L(E_bb')_cc' / n`` for ``E_ab (x) E_cd``.
    """
    n = g.n
    eye = np.eye(n)
    lx = np.zeros((n, n, n, n), dtype=complex)  # lx[b, b', c, c'] = L(E_bb')[c, c']
    for b in range(n):
        for b2 in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[b, b2] = 1.0
            lx[b, b2] = g(e)
    full = np.einsum("AE,DH,BFCG->ABCDEFGH", eye, eye, lx).reshape(n**4, n**4) / n
    mult = np.zeros((n * n, n**4))
    for a in range(n):
        for b in range(n):
            for d in range(n):
                mult[a * n + d, ((a * n + b) * n + b) * n + d] = 1.0
    ker = nullspace(mult, tol)
    gram = dag(ker) @ full @ ker
    gram = (gram + dag(gram)) / 2
    w = np.linalg.eigvalsh(gram)
    top = float(np.max(np.abs(w), initial=0.0))
    if w.size and w[0] < -tol.threshold(top):
        raise NotConditionallyCompletelyPositive(float(w[0]), "GNS Gram matrix")
    rank = int(np.sum(w > tol.threshold(top))) if top > tol.abs_eps else 0
    return CcpGnsGram(dim=ker.shape[1], gram=gram, rank=rank)
