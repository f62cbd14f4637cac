import numpy as np
import pytest
from hypothesis import given, strategies as st

from lighthouse.errors import NonDiagonalisable
from lighthouse.network import (build_circulant, build_global, build_laplacian, circulant_eigenvalues,
                                eigen, from_weights)


def test_global_two_nodes():
    net = build_global(2, 0.0)
    assert np.allclose(net.weights, [[0.5, -0.5], [-0.5, 0.5]])
    assert np.allclose(np.sort(eigen(net).eigenvalues.real), [0, 1])


def test_global_thirty():
    net = build_global(30, 1.0)
    ev = eigen(net).eigenvalues
    assert np.sum(np.abs(ev - 2) < 1e-10) == 29
    assert np.sum(np.abs(ev - 1) < 1e-10) == 1
    assert np.allclose(net.weights @ np.ones(30), 1.0, atol=1e-12)


def test_antisymmetric_circulant():
    eps, N = 1.5, 21
    c = np.zeros(N)
    c[1:] = eps * np.where(np.arange(1, N) % 2 == 1, -1.0, 1.0)
    net = build_circulant(c)
    ev = eigen(net).eigenvalues
    assert abs(net.row_sum) < 1e-12
    assert np.max(np.abs(ev.real)) < 1e-10
    assert 19 < np.max(np.abs(ev)) < 21


def test_laplacian():
    net = build_laplacian(np.ones((3, 3)))
    assert np.allclose(net.weights, [[-2, 1, 1], [1, -2, 1], [1, 1, -2]]) or \
        np.allclose(net.weights, [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]])
    assert net.row_sum == 0.0
    path = build_laplacian(np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float))
    assert np.allclose(np.sort(np.abs(eigen(path).eigenvalues.real)), [0, 1, 3])


def test_identity_and_defective():
    assert np.allclose(eigen(from_weights(np.eye(4))).eigenvalues, 1)
    with pytest.raises(NonDiagonalisable):
        eigen(from_weights(np.array([[1.0, 1.0], [0.0, 1.0]])))


@given(st.lists(st.floats(-3, 3), min_size=2, max_size=12))
def test_circulant_closed_form(c):
    c = np.array(c)
    net = build_circulant(c)
    chi = circulant_eigenvalues(c)
    dense = np.linalg.eigvals(net.weights)
    for z in chi:
        assert np.min(np.abs(dense - z)) < 1e-8 * (1 + np.abs(c).sum())
    N = c.size
    for l in range(1, (N - 1) // 2 + 1):
        assert abs(chi[N - l] - np.conj(chi[l])) < 1e-10 * (1 + np.abs(c).sum())


@given(st.integers(2, 8), st.integers(0, 2**31 - 1))
def test_eigen_residuals_and_row_sum(N, seed):
    rng = np.random.default_rng(seed)
    w = rng.normal(size=(N, N))
    w -= w.sum(axis=1, keepdims=True) / N          # row sum zero
    net = from_weights(w)
    assert net.row_sum is not None and abs(net.row_sum) < 1e-12
    dec = eigen(net)
    for z, v in zip(dec.eigenvalues, dec.eigenvectors.T):
        assert np.linalg.norm(w @ v - z * v) < 1e-8 * np.linalg.norm(v)
    assert np.all(np.diff(dec.eigenvalues.real) <= 1e-12)
