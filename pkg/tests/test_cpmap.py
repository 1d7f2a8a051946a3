import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpinvariance.cpmap import (
    CpMap,
    apply_superop,
    NotCompletelyPositive,
    choi_of,
    compose,
    dual,
    gns_of,
    identity_map,
    is_cp,
    is_unital,
    kraus_from_choi,
    random_kraus,
    superop_from_callable,
)
from cpinvariance.densemat import dag, random_unitary

from conftest import E11, E12, E22, L41, units


def amplify_apply(phi, x, k, n):
    """(id_k kron phi)(x) for x in M_k (x) M_n, evaluated blockwise."""
    out = np.zeros_like(x, dtype=complex)
    for i in range(k):
        for j in range(k):
            out[i * n:(i + 1) * n, j * n:(j + 1) * n] = phi(x[i * n:(i + 1) * n, j * n:(j + 1) * n])
    return out


def bruteforce_cp(phi, n, samples, rng):
    """Oracle: min eigenvalue of (id_n kron phi)(vv*) over random vectors v."""
    worst = np.inf
    for _ in range(samples):
        v = rng.standard_normal(n * n) + 1j * rng.standard_normal(n * n)
        v /= np.linalg.norm(v)
        y = amplify_apply(phi, np.outer(v, v.conj()), n, n)
        worst = min(worst, np.linalg.eigvalsh((y + dag(y)) / 2)[0])
    return worst


def test_choi_of_identity():
    c = choi_of(identity_map(2))
    assert np.isclose(np.trace(c).real, 2.0)
    assert np.linalg.matrix_rank(c) == 1
    assert np.isclose(np.linalg.eigvalsh(c)[-1], 2.0)


def test_choi_of_single_kraus_example():
    t = CpMap.from_kraus([L41])
    assert np.isclose(np.trace(t.choi).real, 3.0)
    assert np.linalg.matrix_rank(t.choi, tol=1e-10) == 1
    assert t.multiplicity == 1
    assert np.allclose(t(E11), dag(L41) @ E11 @ L41)
    assert np.allclose(t(E11), [[1, 1], [1, 1]])


def test_choi_matches_definition(rng):
    t = CpMap.from_kraus(random_kraus(2, 2, rng))
    expect = sum(np.kron(e, t.kraus_apply(e)) for e in units(2))
    assert np.allclose(t.choi, expect)


def test_dephasing_is_unital_cp():
    deph = CpMap.from_kraus([E11, E22])
    assert is_cp(deph) and is_unital(deph)
    assert np.allclose(deph(np.ones((2, 2))), np.eye(2))


def test_transpose_is_not_cp():
    assert not is_cp(lambda b: b.T, 2)
    assert bruteforce_cp(lambda b: b.T, 2, 200, np.random.default_rng(0)) < -0.1
    with pytest.raises(NotCompletelyPositive) as err:
        kraus_from_choi(choi_of(lambda b: b.T, 2), 2)
    assert np.isclose(err.value.min_eigenvalue, -1.0)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 3), st.integers(1, 3), st.integers(0, 10_000))
def test_random_kraus_maps_pass_bruteforce(n, m, seed):
    rng = np.random.default_rng(seed)
    t = CpMap.from_kraus(random_kraus(n, m, rng))
    assert is_cp(t)
    assert bruteforce_cp(t, n, 20, rng) >= -1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 3), st.integers(1, 4), st.integers(0, 10_000))
def test_kraus_round_trip(n, m, seed):
    rng = np.random.default_rng(seed)
    t = CpMap.from_kraus(random_kraus(n, m, rng))
    fitted = kraus_from_choi(t.choi, n)
    assert fitted.multiplicity == min(m, n * n)
    assert np.allclose(fitted.superop, t.superop, atol=1e-10)
    b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    assert np.allclose(fitted.kraus_apply(b), t(b), atol=1e-10)


def test_redundant_family_compresses(rng):
    k = random_kraus(2, 1, rng)[0]
    t = CpMap.from_kraus([k, 2 * k, 1j * k])
    g = gns_of(t)
    assert g.minimal and g.multiplicity == 1
    b = rng.standard_normal((2, 2))
    assert np.allclose(g.inner(b), t(b))


def test_unitary_conjugation_has_multiplicity_one(rng):
    u = random_unitary(3, rng)
    t = CpMap.from_kraus([u])
    assert gns_of(t).multiplicity == 1
    assert is_unital(t)


def test_compose_order(rng):
    s = CpMap.from_kraus(random_kraus(2, 2, rng))
    t = CpMap.from_kraus(random_kraus(2, 2, rng))
    b = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    assert np.allclose(compose(s, t)(b), s(t(b)))
    assert np.allclose(compose(s, t).superop, s.superop @ t.superop)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_dual_trace_pairing(seed):
    rng = np.random.default_rng(seed)
    t = CpMap.from_kraus(random_kraus(3, 2, rng))
    rho = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.isclose(np.trace(dual(t)(rho) @ b), np.trace(rho @ t(b)))


def test_from_superop_keeps_exact_action(rng):
    t = CpMap.from_kraus(random_kraus(2, 3, rng))
    s = CpMap.from_superop(t.superop)
    assert np.array_equal(s.superop, t.superop)
    assert s.multiplicity == 3


def test_superop_from_callable():
    s = superop_from_callable(lambda b: E12 @ b, 2)
    b = np.array([[1, 2], [3, 4]], dtype=complex)
    assert np.allclose(apply_superop(s, b), E12 @ b)
