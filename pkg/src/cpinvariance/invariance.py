"""Invariance of maximal commutative subalgebras under CP maps and CCP
generators, with explicit certificates and the embedded classical dynamics."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .ccpgen import (
    CcpGenerator,
    LindbladForm,
    NotConditionallyCompletelyPositive,
    assemble_lindblad,
    ccp_margin,
    derivation_blocks,
    is_ccp,
    is_markov_generator,
    lindblad_decompose,
)
from .cpmap import CpMap, apply_superop, random_kraus
from .densemat import (
    DEFAULT_TOL,
    PreconditionError,
    Tolerance,
    as_matrix,
    commutator,
    dag,
    lstsq_min_norm,
    nullspace,
    orthonormal_span,
    random_hermitian,
    random_unitary,
)
from .subalg import (
    CommutativeSubalgebra,
    StarAlgebra,
    commutant,
    diagonal_masa,
    full_algebra,
    is_maximal_commutative,
    masa_in_basis,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class NotFound:
    """Failed certificate search; falsy."""

    best_residual: float
    reason: str = ""

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True, eq=False)
class AlphaCertificate:
    """Coefficients ``c_ij(p_k)`` solving ``p L_i - L_i p = sum_j c_ij L_j``.

    ``blocks[k, i, j]`` holds the coordinates of ``c_ij(p_k)`` over the
    minimal projections, so each ``blocks[k]`` is Hermitian in ``(i, j)``.
    """

    projections: np.ndarray
    blocks: np.ndarray
    residual: float

    def coefficient(self, k: int, i: int, j: int) -> np.ndarray:
        return np.tensordot(self.blocks[k, i, j], self.projections, axes=1)

    def alpha(self, coeffs) -> np.ndarray:
        """``c_ij(c)`` for ``c = sum_k coeffs[k] p_k`` (linear extension)."""
        coeffs = np.asarray(coeffs)
        blocks = np.tensordot(coeffs, self.blocks, axes=1)
        return np.tensordot(blocks, self.projections, axes=1)


@dataclass(frozen=True, eq=False)
class RebolledoCertificate:
    """Self-adjoint ``c_i(p_k)`` with ``p L_i - L_i p = c_i L_i``; ``coeffs[k, i]`` over projections."""

    projections: np.ndarray
    coeffs: np.ndarray
    residual: float

    def as_alpha(self) -> AlphaCertificate:
        r, m, _ = self.coeffs.shape
        blocks = np.zeros((r, m, m, r), dtype=complex)
        for i in range(m):
            blocks[:, i, i, :] = self.coeffs[:, i, :]
        return AlphaCertificate(self.projections, blocks, self.residual)


@dataclass(frozen=True, eq=False)
class ZetaCertificate:
    zeta_blocks: np.ndarray
    gamma: np.ndarray
    alpha: AlphaCertificate | NotFound
    residuals: dict = field(default_factory=dict)
    globally_inner: bool = False


@dataclass(frozen=True, eq=False)
class ClassicalGenerator:
    q: np.ndarray
    is_markov: bool


def _require_maximal(c: CommutativeSubalgebra, ambient: StarAlgebra | None, tol: Tolerance):
    ambient = full_algebra(c.n) if ambient is None else ambient
    if not is_maximal_commutative(c, ambient, tol):
        raise PreconditionError(
            "subalgebra is not maximal commutative in the ambient algebra; "
            "the invariance criteria require maximality"
        )


def leakage(superop: np.ndarray, c: CommutativeSubalgebra) -> float:
    """Largest distance from the image of a minimal projection to ``span C``."""
    return max(c.distance(apply_superop(superop, p)) for p in c.projections)


def _invariant(superop: np.ndarray, c: CommutativeSubalgebra, tol: Tolerance) -> bool:
    return leakage(superop, c) <= tol.threshold(max(np.linalg.norm(superop, 2), 1.0))


def direct_invariant_cp(t: CpMap, c: CommutativeSubalgebra, tol: Tolerance = DEFAULT_TOL) -> bool:
    if t.n != c.n:
        raise PreconditionError("dimension mismatch")
    return _invariant(t.superop, c, tol)


def direct_invariant_gen(g: CcpGenerator, c: CommutativeSubalgebra, tol: Tolerance = DEFAULT_TOL) -> bool:
    if g.n != c.n:
        raise PreconditionError("dimension mismatch")
    return _invariant(g.superop, c, tol)


def _hermitian_block_params(m: int, r: int):
    """Real parameters for Hermitian ``m x m`` arrays of ``r`` complex coordinates.

    Yields ``(i, j, l, weight_ij, weight_ji)``.
    """
    for l in range(r):
        for i in range(m):
            yield i, i, l, 1.0, None
            for j in range(i + 1, m):
                yield i, j, l, 1.0, 1.0
                yield i, j, l, 1j, -1j


def _alpha_residuals(kraus, projections, blocks) -> float:
    worst = 0.0
    for k, p in enumerate(projections):
        coeffs = np.tensordot(blocks[k], projections, axes=1)  # (m, m, n, n)
        for i, li in enumerate(kraus):
            rhs = sum((coeffs[i, j] @ lj for j, lj in enumerate(kraus)), np.zeros_like(li))
            worst = max(worst, float(np.linalg.norm(p @ li - li @ p - rhs)))
    return worst


def alpha_residual(kraus, cert: AlphaCertificate) -> float:
    """Recompute the commutator-equation residual of a certificate from scratch."""
    return _alpha_residuals(np.asarray(kraus), cert.projections, cert.blocks)


def _kraus_scale(kraus) -> float:
    kraus = np.asarray(kraus)
    return 1.0 + max((np.linalg.norm(l, 2) for l in kraus), default=0.0)


def alpha_certificate(
    kraus,
    c: CommutativeSubalgebra,
    tol: Tolerance = DEFAULT_TOL,
    ambient: StarAlgebra | None = None,
    check_maximal: bool = True,
) -> AlphaCertificate | NotFound:
    """Solve ``p L_i - L_i p = sum_j c_ij(p) L_j`` with ``c_ij(p) = c_ji(p)*`` in C.

    One least-squares problem per minimal projection; the star condition is
    built into a real parametrization, so any solution defines a *-map.
    """
    kraus = np.asarray(kraus, dtype=complex).reshape(-1, c.n, c.n)
    if check_maximal:
        _require_maximal(c, ambient, tol)
    m, r = kraus.shape[0], c.dim
    projs = c.projections
    blocks = np.zeros((r, m, m, r), dtype=complex)
    params = list(_hermitian_block_params(m, r))
    if m and params:
        # column for each real parameter: its contribution to (sum_j c_ij L_j)_i
        cols = []
        for i, j, l, w_ij, w_ji in params:
            col = np.zeros((m, c.n, c.n), dtype=complex)
            col[i] += w_ij * projs[l] @ kraus[j]
            if w_ji is not None:
                col[j] += w_ji * projs[l] @ kraus[i]
            cols.append(col.reshape(-1))
        a = np.array(cols).T
        a_real = np.vstack([a.real, a.imag])
        for k, p in enumerate(projs):
            target = np.array([p @ li - li @ p for li in kraus]).reshape(-1)
            x, _ = lstsq_min_norm(a_real, np.concatenate([target.real, target.imag]))
            for (i, j, l, w_ij, w_ji), t in zip(params, x):
                blocks[k, i, j, l] += w_ij * t
                if w_ji is not None:
                    blocks[k, j, i, l] += w_ji * t
    residual = _alpha_residuals(kraus, projs, blocks)
    if residual <= tol.threshold(_kraus_scale(kraus)):
        return AlphaCertificate(projs, blocks, residual)
    return NotFound(residual, "no *-map alpha solves the commutator equations in C")


def rebolledo_check(
    kraus, c: CommutativeSubalgebra, tol: Tolerance = DEFAULT_TOL
) -> RebolledoCertificate | NotFound:
    """Diagonal special case: ``p L_i - L_i p = c_i L_i`` with self-adjoint ``c_i`` in C."""
    kraus = np.asarray(kraus, dtype=complex).reshape(-1, c.n, c.n)
    m, r = kraus.shape[0], c.dim
    projs = c.projections
    coeffs = np.zeros((r, m, r))
    for i, li in enumerate(kraus):
        a = np.array([(p @ li).reshape(-1) for p in projs]).T
        a_real = np.vstack([a.real, a.imag])
        for k, p in enumerate(projs):
            target = (p @ li - li @ p).reshape(-1)
            x, _ = lstsq_min_norm(a_real, np.concatenate([target.real, target.imag]))
            coeffs[k, i] = x
    cert = RebolledoCertificate(projs, coeffs, 0.0)
    residual = _alpha_residuals(kraus, projs, cert.as_alpha().blocks)
    if residual <= tol.threshold(_kraus_scale(kraus)):
        return RebolledoCertificate(projs, coeffs, residual)
    return NotFound(residual, "no diagonal (Rebolledo) coefficients")


def rebolledo_after_remix(kraus, c: CommutativeSubalgebra, trials: int = 20, seed: int = 0,
                          tol: Tolerance = DEFAULT_TOL) -> dict:
    """Experiment hook: does the diagonal condition hold after random unitary
    remixing ``L_i -> sum_j u_ij L_j`` of the Kraus family?"""
    kraus = np.asarray(kraus, dtype=complex).reshape(-1, c.n, c.n)
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(trials):
        u = random_unitary(kraus.shape[0], rng)
        if rebolledo_check(np.tensordot(u, kraus, axes=1), c, tol):
            hits += 1
    return {"original": bool(rebolledo_check(kraus, c, tol)), "remixes": trials, "successes": hits}


def _inner(x: np.ndarray, b: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``<x, b y> = sum_i x_i* b y_i`` for block columns."""
    return sum((dag(xi) @ b @ yi for xi, yi in zip(x, y)), np.zeros(b.shape, dtype=complex))


def _condition3(g: CcpGenerator, c: CommutativeSubalgebra, zeta: np.ndarray):
    """Best gamma in C (Hermitian) and the residual blocks of ``L(p) - <zeta, p zeta> - gamma p``."""
    gammas, res = [], []
    for p in c.projections:
        r = g(p) - _inner(zeta, p, zeta)
        gk = float(np.trace(p @ r).real / np.trace(p).real)
        gammas.append(gk)
        res.append(r - gk * p)
    return np.array(gammas), np.array(res)


def zeta_certificate(
    g: CcpGenerator,
    c: CommutativeSubalgebra,
    tol: Tolerance = DEFAULT_TOL,
    ambient: StarAlgebra | None = None,
    restarts: int = 4,
    seed: int = 0,
    check_maximal: bool = True,
) -> ZetaCertificate | NotFound:
    """Search ``zeta`` in ``span d(C) C`` and Hermitian ``gamma`` in C with
    ``d(c) = c zeta - zeta c`` and ``L(c) - <zeta, c zeta> = gamma c`` on C.

    A ``NotFound`` only reports that the search failed; the authoritative
    answer is :func:`direct_invariant_gen`.
    """
    n = g.n
    if check_maximal:
        _require_maximal(c, ambient, tol)
    if not is_ccp(g, tol):
        raise NotConditionallyCompletelyPositive(ccp_margin(g))
    form = lindblad_decompose(g, tol)
    zeta0 = form.kraus
    m = zeta0.shape[0]
    scale = 1.0 + np.linalg.norm(g.superop, 2)
    projs = c.projections
    d_c = [derivation_blocks(zeta0, p) for p in projs]

    # stage A: affine family of zeta in span d(C)C reproducing d on C
    spanning = [(dp @ q).reshape(-1) for dp in d_c for q in projs]
    basis = orthonormal_span(np.array(spanning).T, tol) if m else np.zeros((0, 0))
    dim_f = basis.shape[1] if m else 0
    if dim_f:
        vecs = basis.T.reshape(dim_f, m, n, n)
        a = np.vstack([
            np.array([derivation_blocks(v, p).reshape(-1) for v in vecs]).T for p in projs
        ])
        target = np.concatenate([dp.reshape(-1) for dp in d_c])
        y0, stage_a = lstsq_min_norm(a, target)
        free = nullspace(a, tol)
    else:
        vecs = np.zeros((0, m, n, n), dtype=complex)
        y0 = np.zeros(0, dtype=complex)
        stage_a = float(np.linalg.norm(np.concatenate([dp.reshape(-1) for dp in d_c]))) if m else 0.0
        free = np.zeros((0, 0))
    if stage_a > tol.threshold(scale):
        return _search_failed(g, c, tol, NotFound(stage_a, "d restricted to C is not inner in span d(C)C"))

    def zeta_of(y):
        return np.tensordot(y, vecs, axes=1) if dim_f else np.zeros((m, n, n), dtype=complex)

    def objective(tvec):
        t = tvec[: free.shape[1]] + 1j * tvec[free.shape[1]:]
        _, res = _condition3(g, c, zeta_of(y0 + free @ t))
        flat = res.reshape(-1)
        return np.concatenate([flat.real, flat.imag])

    best_y = y0
    best = float(np.linalg.norm(objective(np.zeros(2 * free.shape[1]))))
    if best > tol.threshold(scale) and free.shape[1]:
        rng = np.random.default_rng(seed)
        starts = [np.zeros(2 * free.shape[1])] + [rng.standard_normal(2 * free.shape[1]) for _ in range(restarts)]
        for s in starts:
            sol = scipy.optimize.least_squares(objective, s, xtol=1e-15, ftol=1e-15, gtol=1e-15)
            val = float(np.linalg.norm(sol.fun))
            if val < best:
                best = val
                best_y = y0 + free @ (sol.x[: free.shape[1]] + 1j * sol.x[free.shape[1]:])
            if best <= tol.threshold(scale):
                break
    if best > tol.threshold(scale):
        return _search_failed(g, c, tol, NotFound(best, "no zeta in the affine family reproduces L on C up to gamma"))

    zeta = zeta_of(best_y)
    gcoef, res3 = _condition3(g, c, zeta)
    gamma = c.element(gcoef)
    alpha = alpha_certificate(zeta, c, tol, check_maximal=False) if m else AlphaCertificate(
        projs, np.zeros((c.dim, 0, 0, c.dim)), 0.0)
    reproduce = max(
        (float(np.linalg.norm(derivation_blocks(zeta, p) - dp)) for p, dp in zip(projs, d_c)), default=0.0
    )
    residuals = {
        "reproduce": reproduce,
        "intertwining": alpha.residual if alpha else alpha.best_residual,
        "restriction": float(max((np.linalg.norm(r) for r in res3), default=0.0)),
    }
    return ZetaCertificate(
        zeta_blocks=zeta,
        gamma=gamma,
        alpha=alpha,
        residuals=residuals,
        globally_inner=_globally_inner(zeta, zeta0, tol, scale),
    )


def _globally_inner(zeta, zeta0, tol: Tolerance, scale: float) -> bool:
    """Does ``zeta`` implement ``d`` on all of M_n, not just on C?"""
    if zeta0.shape[0] == 0:
        return True
    n = zeta0.shape[-1]
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = 1.0
            if not tol.is_zero(derivation_blocks(zeta, e) - derivation_blocks(zeta0, e), scale):
                return False
    return True


def _search_failed(g, c, tol, result: NotFound) -> NotFound:
    if direct_invariant_gen(g, c, tol):
        log.warning("zeta search failed on an invariant generator (search incompleteness): %s", result.reason)
    return result


def zeta_condition_residuals(g: CcpGenerator, c: CommutativeSubalgebra, cert: ZetaCertificate) -> dict:
    """Re-evaluate the certificate conditions from scratch."""
    form = lindblad_decompose(g)
    d_c = [derivation_blocks(form.kraus, p) for p in c.projections]
    zeta = cert.zeta_blocks
    reproduce = max(
        (float(np.linalg.norm(derivation_blocks(zeta, p) - dp)) for p, dp in zip(c.projections, d_c)), default=0.0
    )
    restr = max(
        float(np.linalg.norm(g(p) - _inner(zeta, p, zeta) - cert.gamma @ p)) for p in c.projections
    )
    cond2 = alpha_residual(zeta, cert.alpha) if cert.alpha and zeta.shape[0] else 0.0
    gamma_ok = float(np.linalg.norm(cert.gamma - dag(cert.gamma))) + c.distance(cert.gamma)
    return {"reproduce": reproduce, "intertwining": cond2, "restriction": restr, "gamma": gamma_ok}


def _coefficient_matrix(superop: np.ndarray, c: CommutativeSubalgebra) -> np.ndarray:
    """``M[k, l]`` = coefficient of ``p_k`` in ``Phi(p_l)``."""
    cols = [c.coefficients(apply_superop(superop, p)) for p in c.projections]
    return np.array(cols).T


def restrict_classical(g: CcpGenerator, c: CommutativeSubalgebra, tol: Tolerance = DEFAULT_TOL) -> ClassicalGenerator:
    """Q-matrix of ``L`` on C: ``(Q f)_k`` is the ``p_k`` coefficient of ``L(sum f_l p_l)``."""
    if not direct_invariant_gen(g, c, tol):
        raise PreconditionError("generator does not leave the subalgebra invariant")
    q = _coefficient_matrix(g.superop, c)
    scale = max(np.linalg.norm(g.superop, 2), 1.0)
    if np.abs(q.imag).max(initial=0.0) > tol.threshold(scale) * 1e3:
        raise RuntimeError(f"restricted generator has imaginary part {np.abs(q.imag).max():.3e}")
    q = q.real
    markov = is_markov_generator(g, tol)
    if markov:
        off = q - np.diag(np.diag(q))
        thresh = tol.threshold(scale) * 1e3
        if off.min(initial=0.0) < -thresh or np.abs(q.sum(axis=1)).max() > thresh:
            raise RuntimeError("restricted Markov generator is not a Q-matrix")
    return ClassicalGenerator(q=q, is_markov=markov)


def restrict_stochastic(t: CpMap, c: CommutativeSubalgebra, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``P[k, l]`` = coefficient of ``p_k`` in ``T(p_l)``."""
    if not direct_invariant_cp(t, c, tol):
        raise PreconditionError("map does not leave the subalgebra invariant")
    return _coefficient_matrix(t.superop, c).real


@dataclass(frozen=True)
class Lemma44Result:
    holds: bool
    hypotheses_hold: bool
    in_subalgebra: bool
    reason: str

    def __bool__(self) -> bool:
        return self.holds


def lemma44_check(
    h, c: CommutativeSubalgebra, ambient: StarAlgebra | None = None, tol: Tolerance = DEFAULT_TOL
) -> Lemma44Result:
    """If ``[p, h]`` lies in the commutant of C for every minimal ``p``, then ``h`` is in C."""
    h = as_matrix(h)
    ambient = full_algebra(c.n) if ambient is None else ambient
    if not ambient.contains(h, tol):
        raise PreconditionError("h is not in the ambient algebra")
    _require_maximal(c, ambient, tol)
    c_prime = commutant(c.algebra, full_algebra(c.n), tol)
    scale = max(np.linalg.norm(h), 1.0)
    hyp = all(c_prime.distance(commutator(p, h)) <= tol.threshold(scale) for p in c.projections)
    inside = c.distance(h) <= tol.threshold(scale)
    if not hyp:
        return Lemma44Result(False, False, inside, "hypothesis violated")
    if not inside:
        return Lemma44Result(False, True, False, "numerical-tolerance fault: hypotheses hold but h is not in C")
    return Lemma44Result(True, True, True, "h lies in C")


# ---------------------------------------------------------------------------
# random instances and the cross-check harness


def monomial_kraus(n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """Random diagonal-times-permutation operators; each leaves the diagonal algebra invariant."""
    ops = []
    for _ in range(m):
        perm = np.eye(n)[rng.permutation(n)]
        diag = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        ops.append(np.diag(diag) @ perm)
    return np.array(ops, dtype=complex)


def invariant_cp_instance(n: int, rng: np.random.Generator, rotate: bool = True):
    """CP map leaving ``U diag U*`` invariant, given through a remixed Kraus family."""
    m = int(rng.integers(1, n * n + 1))
    kraus = np.tensordot(random_unitary(m, rng), monomial_kraus(n, m, rng), axes=1)
    u = random_unitary(n, rng) if rotate else np.eye(n, dtype=complex)
    kraus = np.array([u @ l @ dag(u) for l in kraus])
    return CpMap.from_kraus(kraus, n), masa_in_basis(u)


def generic_cp_instance(n: int, rng: np.random.Generator, rotate: bool = True):
    m = int(rng.integers(1, n * n + 1))
    u = random_unitary(n, rng) if rotate else np.eye(n, dtype=complex)
    return CpMap.from_kraus(random_kraus(n, m, rng), n), masa_in_basis(u)


def _derangement(n: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        perm = rng.permutation(n)
        if n == 1 or np.all(perm != np.arange(n)):
            return perm


def invariant_generator_instance(n: int, rng: np.random.Generator, rotate: bool = True):
    """Markov generator ``L_i = D_i + Z_i`` (diagonal plus weighted derangement) whose CP
    part alone is not invariant, compensated by ``beta = -sum D_i* Z_i + diagonal``."""
    m = int(rng.integers(1, n + 2))
    ds, zs = [], []
    for _ in range(m):
        ds.append(np.diag(rng.standard_normal(n) + 1j * rng.standard_normal(n)))
        weights = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * (rng.random(n) < 0.8)
        zs.append(np.diag(weights) @ np.eye(n)[_derangement(n, rng)])
    kraus = np.array([d + z for d, z in zip(ds, zs)])
    dd = sum(dag(d) @ d for d in ds)
    zz = sum(dag(z) @ z for z in zs)
    dz = sum(dag(d) @ z for d, z in zip(ds, zs))
    beta = -dz - 0.5 * (dd + zz) + 1j * np.diag(rng.standard_normal(n))
    cp = CpMap.from_kraus(kraus, n)
    s = cp.superop + np.kron(beta.T, np.eye(n)) + np.kron(np.eye(n), dag(beta))
    u = random_unitary(n, rng) if rotate else np.eye(n, dtype=complex)
    conj = np.kron(u.conj(), u)  # b -> u b u*
    s = conj @ s @ dag(conj)
    return CcpGenerator(n, s), masa_in_basis(u)


def generic_generator_instance(n: int, rng: np.random.Generator, rotate: bool = True):
    m = int(rng.integers(1, n + 2))
    form = LindbladForm(h=random_hermitian(n, rng), kraus=random_kraus(n, m, rng))
    u = random_unitary(n, rng) if rotate else np.eye(n, dtype=complex)
    return assemble_lindblad(form), masa_in_basis(u)


def example41_generator() -> CcpGenerator:
    l = np.array([[1, 1], [0, 1]], dtype=complex)
    beta = -np.array([[0, 1], [0, 0]], dtype=complex)
    return assemble_lindblad(LindbladForm(h=(beta - dag(beta)) / 2j, kraus=l[None]))


def example41_cp_part() -> CpMap:
    return CpMap.from_kraus([np.array([[1, 1], [0, 1]], dtype=complex)], 2)


@dataclass
class CrosscheckReport:
    trials: int = 0
    cp_agree: int = 0
    gen_agree: int = 0
    zeta_search_failures: int = 0
    disagreements: list = field(default_factory=list)
    fixtures: dict = field(default_factory=dict)
    worst_invariant_residual: float = 0.0
    best_noninvariant_residual: float = float("inf")

    @property
    def ok(self) -> bool:
        return not self.disagreements and all(self.fixtures.values())

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "cp_agree": self.cp_agree,
            "gen_agree": self.gen_agree,
            "zeta_search_failures": self.zeta_search_failures,
            "disagreements": list(self.disagreements),
            "fixtures": dict(self.fixtures),
            "worst_invariant_residual": self.worst_invariant_residual,
            "best_noninvariant_residual": (
                None if np.isinf(self.best_noninvariant_residual) else self.best_noninvariant_residual
            ),
        }


def check_fixtures(tol: Tolerance = DEFAULT_TOL) -> dict[str, bool]:
    c = diagonal_masa(2)
    g = example41_generator()
    cp = example41_cp_part()
    zeta = zeta_certificate(g, c, tol)
    death = np.array([[0.0, 0.0], [1.0, -1.0]])
    return {
        "example41_generator_invariant": direct_invariant_gen(g, c, tol),
        "example41_cp_part_not_invariant": not direct_invariant_cp(cp, c, tol)
        and not alpha_certificate(cp.kraus, c, tol),
        "example41_death_process": np.allclose(restrict_classical(g, c, tol).q, death, atol=1e-10),
        "example43_zeta": bool(zeta)
        and np.allclose(zeta.zeta_blocks, [[[0, 1], [0, 0]]], atol=1e-9)
        and np.allclose(zeta.gamma, -np.diag([0, 1]), atol=1e-9),
        "lemma44_diagonal": bool(lemma44_check(np.diag([1.0, 2.0]), c, tol=tol)),
        "lemma44_counter": lemma44_check(np.array([[0, 1], [1, 0]]), c, tol=tol).reason == "hypothesis violated",
    }


def crosscheck_theorems(
    seed: int = 0,
    trials: int = 100,
    n: int = 2,
    tol: Tolerance = DEFAULT_TOL,
    include_fixtures: bool = True,
    generators: bool = True,
) -> CrosscheckReport:
    """Compare certificate existence against direct invariance on random instances.

    Even trial indices are invariant by construction, odd ones generic; each
    trial is seeded by ``(seed, index)``.
    """
    if n > 4:
        raise PreconditionError("cross-check harness is limited to n <= 4")
    report = CrosscheckReport()
    for idx in range(trials):
        rng = np.random.default_rng([seed, idx])
        build = invariant_cp_instance if idx % 2 == 0 else generic_cp_instance
        t, c = build(n, rng)
        direct = direct_invariant_cp(t, c, tol)
        cert = alpha_certificate(t.kraus, c, tol, check_maximal=False)
        res = cert.residual if cert else cert.best_residual
        if direct:
            report.worst_invariant_residual = max(report.worst_invariant_residual, res)
        else:
            report.best_noninvariant_residual = min(report.best_noninvariant_residual, res)
        if bool(cert) == direct:
            report.cp_agree += 1
        else:
            report.disagreements.append({"trial": idx, "kind": "cp", "direct": direct, "residual": res})
        if generators:
            gbuild = invariant_generator_instance if idx % 2 == 0 else generic_generator_instance
            g, cg = gbuild(n, rng)
            gdirect = direct_invariant_gen(g, cg, tol)
            z = zeta_certificate(g, cg, tol, check_maximal=False)
            if gdirect and not z:
                report.zeta_search_failures += 1
            if bool(z) == gdirect:
                report.gen_agree += 1
            else:
                report.disagreements.append({"trial": idx, "kind": "generator", "direct": gdirect})
        report.trials += 1
    if include_fixtures:
        report.fixtures = check_fixtures(tol)
    return report
