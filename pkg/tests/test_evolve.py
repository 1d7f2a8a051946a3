import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpinvariance.ccpgen import CcpGenerator
from cpinvariance.cpmap import is_cp, is_unital
from cpinvariance.densemat import PreconditionError, dag, expm
from cpinvariance.evolve import invariance_over_time, is_ccp_flow, offdiag_decay, semigroup_at, trajectory
from cpinvariance.invariance import (
    example41_cp_part,
    example41_generator,
    generic_generator_instance,
    invariant_generator_instance,
    restrict_classical,
    restrict_stochastic,
)
from cpinvariance.subalg import diagonal_masa

C2 = diagonal_masa(2)


def death_semigroup(t):
    return np.array([[1.0, 0.0], [1 - math.exp(-t), math.exp(-t)]])


def test_time_zero_is_identity():
    t0 = semigroup_at(example41_generator(), 0.0)
    assert np.allclose(t0.superop, np.eye(4))
    with pytest.raises(PreconditionError):
        semigroup_at(example41_generator(), -0.1)


@pytest.mark.parametrize("t", [0.25, 1.0, 2.0])
def test_example_restricted_semigroup(t):
    p = restrict_stochastic(semigroup_at(example41_generator(), t), C2)
    assert np.allclose(p, death_semigroup(t), atol=1e-12)


def test_hamiltonian_flow_is_unitary_conjugation():
    h = np.array([[1.0, 0.5j], [-0.5j, -1.0]])
    t = 0.8
    # b' = i(b h - h b) is solved by b(t) = e^{-ith} b e^{ith}
    u = expm(-1j * t * h)
    b = np.array([[1.0, 2.0], [3.0, 4.0]])
    g = CcpGenerator.hamiltonian(h)
    assert np.allclose(semigroup_at(g, t)(b), u @ b @ dag(u))
    eps = 1e-6
    deriv = (semigroup_at(g, eps)(b) - semigroup_at(g, 0.0)(b)) / eps
    assert np.allclose(deriv, 1j * (b @ h - h @ b), atol=1e-5)


def test_leakage_examples():
    grid = [0.0, 0.5, 1.0, 2.0]
    assert invariance_over_time(example41_generator(), C2, grid).max() <= 1e-9
    leak = invariance_over_time(CcpGenerator.from_cp(example41_cp_part()), C2, grid)
    assert leak[0] < 1e-14 and np.all(leak[1:] > 0.1)
    assert np.all(invariance_over_time(CcpGenerator.zero(2), C2, grid) == 0)


def test_offdiag_decay_examples():
    grid = np.linspace(0.0, 3.0, 13)
    curve = offdiag_decay(example41_generator(), C2, np.full((2, 2), 0.5), grid)
    assert np.isclose(curve[0], 1 / math.sqrt(2))
    assert np.all(np.diff(curve) < 0)
    flat = offdiag_decay(CcpGenerator.zero(2), C2, np.full((2, 2), 0.5), grid)
    assert np.allclose(flat, flat[0])
    diag = offdiag_decay(example41_generator(), C2, np.diag([0.3, 0.7]), grid)
    assert np.allclose(diag, 0)
    with pytest.raises(PreconditionError):
        offdiag_decay(example41_generator(), C2, np.diag([1.0, 1.0]), grid)


def test_trajectory_semigroup_property():
    traj = trajectory(example41_generator(), np.arange(0, 2.01, 0.25))
    assert traj.semigroup_defect() < 1e-12
    assert np.allclose(traj.maps[0].superop, np.eye(4))


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 3), st.booleans(), st.integers(0, 10_000))
def test_flow_is_cp_and_unital(n, invariant, seed):
    rng = np.random.default_rng(seed)
    build = invariant_generator_instance if invariant else generic_generator_instance
    g, c = build(n, rng)
    grid = np.arange(0, 2.01, 0.5)
    assert is_ccp_flow(g, grid)
    for t in grid:
        tt = semigroup_at(g, t)
        assert is_cp(tt) and is_unital(tt, tol=__import__("cpinvariance").Tolerance.uniform(1e-9))
    if invariant:
        q = restrict_classical(g, c).q
        assert invariance_over_time(g, c, grid).max() <= 1e-9
        for t in grid:
            assert np.allclose(restrict_stochastic(semigroup_at(g, t), c), expm(t * q), atol=1e-8)
