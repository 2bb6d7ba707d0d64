# -*- coding: utf-8 -*-
"""
Tests for linalg module
"""
import numpy as np
import pytest
import scipy.linalg
import sys
sys.path.append("..")
from opduality.base import InconsistentRHS, NotSelfadjoint, NotSPD, random_gram, random_spd
from opduality.linalg import (
    SparseSymmetric,
    cholesky_spd,
    gram_orthonormalize,
    gram_rank,
    jacobi_eigh,
    null_space,
    orthogonal_complement,
    pinv_selfadjoint,
    solve_dense_spd,
    solve_spd,
    sym_eigen,
)

PATH3 = np.array([[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]])


def test_sparse_symmetric_roundtrip():
    """Test upper-triangle storage expands to the full matrix"""
    s = SparseSymmetric.from_dense(PATH3)
    assert all(r <= c for r, c, _ in s.triplets)
    np.testing.assert_allclose(s.to_dense(), PATH3)


def test_sparse_symmetric_rejects_bad_triplets():
    """Test lower-triangle and duplicate triplets"""
    with pytest.raises(ValueError):
        SparseSymmetric(2, ((1, 0, 1.0),))
    with pytest.raises(ValueError):
        SparseSymmetric(2, ((0, 1, 1.0), (0, 1, 2.0)))
    assert SparseSymmetric(3).to_dense().shape == (3, 3)


def test_cholesky_spd():
    """Test Cholesky factor and SPD failures"""
    m = random_spd(np.random.default_rng(1), 4)
    lower = cholesky_spd(m)
    np.testing.assert_allclose(lower @ lower.T, m, atol=1e-12)
    with pytest.raises(NotSPD):
        cholesky_spd([[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(NotSPD):
        cholesky_spd([[1.0, 0.5], [0.0, 1.0]])
    with pytest.raises(NotSPD):
        cholesky_spd(PATH3)


def test_jacobi_matches_lapack():
    """Test cyclic Jacobi against eigh"""
    rng = np.random.default_rng(2)
    b = rng.standard_normal((6, 6))
    c = b + b.T
    values, vectors = jacobi_eigh(c)
    np.testing.assert_allclose(np.sort(values), np.linalg.eigvalsh(c), atol=1e-10)
    np.testing.assert_allclose(vectors.T @ vectors, np.eye(6), atol=1e-12)
    np.testing.assert_allclose(c @ vectors, vectors * values, atol=1e-10)


def test_sym_eigen_generalized():
    """Test generalized eigenpairs are Gram-orthonormal"""
    rng = np.random.default_rng(3)
    g = random_gram(rng, 5)
    s = random_spd(rng, 5)
    a = np.linalg.solve(g, s)
    eig = sym_eigen(a, g)
    np.testing.assert_allclose(eig.values, scipy.linalg.eigh(s, g, eigvals_only=True), rtol=1e-10)
    np.testing.assert_allclose(eig.vectors.T @ g @ eig.vectors, np.eye(5), atol=1e-10)
    np.testing.assert_allclose(eig.apply(lambda lam: lam), a, atol=1e-9)


def test_sym_eigen_rejects_nonselfadjoint():
    """Test asymmetric G A"""
    with pytest.raises(NotSelfadjoint):
        sym_eigen([[1.0, 1.0], [0.0, 1.0]], np.eye(2))


def test_null_space_and_pinv():
    """Test kernel and pseudo-inverse of a singular operator"""
    kernel = null_space(PATH3, np.eye(3))
    assert kernel.shape == (3, 1)
    np.testing.assert_allclose(np.abs(kernel[:, 0]), np.full(3, 1 / np.sqrt(3)), atol=1e-10)
    inv, singular = pinv_selfadjoint(np.diag([2.0, 0.0]), np.eye(2))
    assert singular
    np.testing.assert_allclose(inv, np.diag([0.5, 0.0]), atol=1e-12)


def test_round_off_operator_is_all_kernel():
    """Test an operator that is zero up to round-off"""
    noise = np.diag([1e-17, -2e-17])
    assert null_space(noise, np.eye(2)).shape == (2, 2)
    inv, singular = pinv_selfadjoint(noise, np.eye(2))
    assert singular
    np.testing.assert_allclose(inv, 0.0, atol=1e-30)
    # floor 0 measures the cutoff against the operator's own scale
    assert null_space(noise, np.eye(2), floor=0.0).shape == (2, 0)


def test_gram_orthonormalize_drops_dependent_columns():
    """Test rank detection in a weighted inner product"""
    g = np.diag([1.0, 4.0, 9.0])
    cols = np.array([[1.0, 2.0, 0.0], [0.0, 0.0, 1.0], [1.0, 2.0, 0.0]])
    q = gram_orthonormalize(cols, g)
    assert q.shape == (3, 2)
    np.testing.assert_allclose(q.T @ g @ q, np.eye(2), atol=1e-12)
    assert gram_rank(cols, g) == 2
    comp = orthogonal_complement(cols, g)
    assert comp.shape == (3, 1)
    np.testing.assert_allclose(q.T @ g @ comp, 0.0, atol=1e-12)


def test_solve_spd_grounded():
    """Test CG on a Laplacian pinned at index 0"""
    x = solve_spd(SparseSymmetric.from_dense(PATH3), [-1.0, 1.0, 0.0])
    np.testing.assert_allclose(x, [0.0, 1.0, 1.0], atol=1e-9)
    with pytest.raises(InconsistentRHS):
        solve_spd(PATH3, [1.0, 0.0, 0.0])


def test_solve_spd_matches_dense():
    """Test CG and direct solve agree on an SPD system"""
    rng = np.random.default_rng(4)
    m = random_spd(rng, 8)
    b = rng.standard_normal(8)
    np.testing.assert_allclose(solve_spd(m, b), solve_dense_spd(m, b), rtol=1e-6, atol=1e-8)
    np.testing.assert_allclose(solve_spd(m, np.zeros(8)), np.zeros(8))
