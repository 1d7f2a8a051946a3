import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpinvariance.densemat import (
    PreconditionError,
    Tolerance,
    dag,
    eig_hermitian,
    expm,
    is_psd,
    lstsq_min_norm,
    nullspace,
    unvec,
    vec,
)


def taylor_expm(a, terms=80):
    """Oracle: scaled truncated power series, squared back."""
    s = max(0, int(np.ceil(np.log2(max(np.linalg.norm(a, 1), 1.0)))) + 1)
    b = a / 2**s
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ b / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def complex_matrices(n, scale=1.0):
    return st.integers(0, 2**32 - 1).map(
        lambda seed: scale * (np.random.default_rng(seed).standard_normal((n, n))
                              + 1j * np.random.default_rng(seed + 1).standard_normal((n, n)))
    )


def test_tolerance_rule():
    tol = Tolerance(1e-3, 1e-2)
    assert tol.is_zero(1.05e-2, scale=1.0)
    assert not tol.is_zero(1.2e-2, scale=1.0)
    with pytest.raises(ValueError):
        Tolerance(-1.0, 0.0)


def test_vec_is_column_stacking():
    a = np.array([[1, 2], [3, 4]])
    assert vec(a).tolist() == [1, 3, 2, 4]
    assert np.array_equal(unvec(vec(a)), a)


@settings(max_examples=40, deadline=None)
@given(complex_matrices(3), complex_matrices(3), complex_matrices(3))
def test_vec_sandwich_identity(a, x, b):
    assert np.allclose(vec(a @ x @ b), np.kron(b.T, a) @ vec(x))
    assert np.allclose(unvec(vec(x)), x)


@settings(max_examples=40, deadline=None)
@given(complex_matrices(4), complex_matrices(4))
def test_adjoint_and_trace_identities(a, b):
    assert np.allclose(dag(dag(a)), a)
    assert np.allclose(dag(a @ b), dag(b) @ dag(a))
    assert np.isclose(np.trace(a @ b), np.trace(b @ a))


def test_eig_hermitian_examples():
    w, v = eig_hermitian(np.eye(2))
    assert np.allclose(w, [1, 1]) and np.allclose(v, np.eye(2))
    w, v = eig_hermitian(np.diag([3.0, -1.0]))
    assert np.allclose(w, [-1, 3])
    assert np.allclose(np.abs(v), [[0, 1], [1, 0]])
    w, v = eig_hermitian(np.array([[0, 1], [1, 0]]))
    assert np.allclose(w, [-1, 1])
    assert np.isclose(abs(np.vdot(v[:, 0], [1, -1])) / math.sqrt(2), 1.0)
    assert np.isclose(abs(np.vdot(v[:, 1], [1, 1])) / math.sqrt(2), 1.0)


def test_eig_hermitian_rejects_non_hermitian():
    with pytest.raises(PreconditionError, match="1.414"):
        eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


@settings(max_examples=30, deadline=None)
@given(complex_matrices(5))
def test_eig_reconstruction(z):
    a = (z + dag(z)) / 2
    w, v = eig_hermitian(a)
    assert np.linalg.norm(a - v @ np.diag(w) @ dag(v)) <= 1e-12 * max(1, np.linalg.norm(a))
    assert np.allclose(dag(v) @ v, np.eye(5))


def test_lstsq_examples():
    b = np.array([[1.0, 2.0], [3.0, 4.0]])
    x, res = lstsq_min_norm(np.eye(2), b)
    assert np.allclose(x, b) and res < 1e-14
    x, res = lstsq_min_norm(np.array([[1.0], [1.0]]), np.array([1.0, 3.0]))
    assert np.allclose(x, [2.0]) and math.isclose(res, math.sqrt(2))
    x, res = lstsq_min_norm(np.zeros((2, 2)), np.zeros(2))
    assert np.allclose(x, 0) and res == 0


def test_lstsq_min_norm_among_minimizers():
    x, res = lstsq_min_norm(np.array([[1.0, 1.0]]), np.array([2.0]))
    assert np.allclose(x, [1.0, 1.0]) and res < 1e-14


def test_nullspace_examples():
    assert nullspace(np.array([[1.0, 2.0], [3.0, 4.0]])).shape == (2, 0)
    ns = nullspace(np.zeros((2, 3)))
    assert ns.shape == (3, 3) and np.allclose(dag(ns) @ ns, np.eye(3))
    ns = nullspace(np.array([[1.0, 1.0]]))
    assert ns.shape == (2, 1)
    assert np.isclose(abs(ns[:, 0] @ np.array([1, -1])) / math.sqrt(2), 1.0)


def test_is_psd_examples():
    assert is_psd(np.eye(2))
    assert not is_psd(np.diag([1.0, -1.0]))
    assert is_psd(np.array([[1.0, 1.0], [1.0, 1.0]]))
    with pytest.raises(PreconditionError):
        is_psd(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_expm_examples():
    assert np.allclose(expm(np.zeros((3, 3))), np.eye(3))
    assert np.allclose(expm(np.diag([1.0, 2.0])), np.diag([math.e, math.e**2]))
    for t in (0.3, 1.0, 2.5):
        closed = np.array([[1, 0], [1 - math.exp(-t), math.exp(-t)]])
        assert np.allclose(expm(t * np.array([[0.0, 0.0], [1.0, -1.0]])), closed, atol=1e-13)


@settings(max_examples=30, deadline=None)
@given(complex_matrices(4))
def test_expm_inverse_and_taylor_oracle(z):
    a = 5 * z / max(np.linalg.norm(z, 2), 1e-12) * 0.999
    assert np.allclose(expm(a) @ expm(-a), np.eye(4), atol=1e-9)
    assert np.allclose(expm(a), taylor_expm(a), atol=1e-8 * np.linalg.norm(taylor_expm(a)))


def test_expm_normal_path_matches_pade(rng):
    z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    skew = (z - dag(z)) / 2
    assert np.allclose(expm(skew), taylor_expm(skew), atol=1e-12)
    herm = (z + dag(z)) / 2
    assert np.allclose(expm(herm), taylor_expm(herm), rtol=1e-10)
