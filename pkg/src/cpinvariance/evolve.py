"""Semigroups ``T_t = exp(t L)`` and time-grid diagnostics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ccpgen import CcpGenerator, is_ccp
from .cpmap import CpMap, NotCompletelyPositive, apply_superop, is_cp
from .densemat import DEFAULT_TOL, PreconditionError, Tolerance, dag, expm, is_psd
from .invariance import leakage
from .subalg import CommutativeSubalgebra


class NumericalFault(RuntimeError):
    pass


def _flow(g: CcpGenerator, t: float, tol: Tolerance) -> np.ndarray:
    if t < 0:
        raise PreconditionError(f"semigroup time must be nonnegative, got {t}")
    return expm(t * g.superop, tol)


def semigroup_at(g: CcpGenerator, t: float, tol: Tolerance = DEFAULT_TOL) -> CpMap:
    """``T_t`` as a CpMap; the exact exponential is kept as its superoperator."""
    try:
        return CpMap.from_superop(_flow(g, t, tol), tol)
    except NotCompletelyPositive as err:
        raise NumericalFault(f"exp({t} L) is not completely positive: {err}") from err


@dataclass(frozen=True, eq=False)
class SemigroupTrajectory:
    times: np.ndarray
    maps: tuple

    def semigroup_defect(self) -> float:
        """Max ``|T_a T_b - T_{a+b}|`` over grid triples."""
        worst = 0.0
        index = {round(float(t), 12): k for k, t in enumerate(self.times)}
        for i, a in enumerate(self.times):
            for j, b in enumerate(self.times):
                k = index.get(round(float(a + b), 12))
                if k is not None:
                    prod = self.maps[i].superop @ self.maps[j].superop
                    worst = max(worst, float(np.linalg.norm(prod - self.maps[k].superop)))
        return worst


def trajectory(g: CcpGenerator, grid, tol: Tolerance = DEFAULT_TOL) -> SemigroupTrajectory:
    times = np.sort(np.asarray(grid, dtype=float))
    if times.size and times[0] < 0:
        raise PreconditionError("time grid must be nonnegative")
    return SemigroupTrajectory(times, tuple(semigroup_at(g, t, tol) for t in times))


def invariance_over_time(g: CcpGenerator, c: CommutativeSubalgebra, grid, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Leakage ``max_k dist(T_t(p_k), span C)`` at each grid time."""
    return np.array([leakage(_flow(g, float(t), tol), c) for t in grid])


def offdiag_decay(
    g: CcpGenerator, c: CommutativeSubalgebra, rho0, grid, tol: Tolerance = DEFAULT_TOL
) -> np.ndarray:
    """Frobenius norm of the off-diagonal part of ``U* rho_t U`` along the dual flow."""
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (g.n, g.n):
        raise PreconditionError(f"state of shape {rho0.shape} for n = {g.n}")
    if not is_psd(rho0, tol) or abs(np.trace(rho0) - 1) > 1e-8:
        raise PreconditionError("rho0 must be a density matrix (PSD, unit trace)")
    u = c.diagonalizer
    out = []
    for t in grid:
        rho = apply_superop(dag(_flow(g, float(t), tol)), rho0)
        r = dag(u) @ rho @ u
        out.append(float(np.linalg.norm(r - np.diag(np.diag(r)))))
    return np.array(out)


def is_ccp_flow(g: CcpGenerator, grid, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Every ``T_t`` on the grid is CP (requires ``g`` CCP)."""
    if not is_ccp(g, tol):
        return False
    return all(is_cp(_flow(g, float(t), tol), tol=tol) for t in grid)
