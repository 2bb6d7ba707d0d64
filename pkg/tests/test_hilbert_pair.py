# -*- coding: utf-8 -*-
"""
Tests for hilbert_pair module
"""
import numpy as np
import pytest
import sys
sys.path.append("..")
from opduality.base import NotSPD, all_passed, random_gram
from opduality.hilbert_pair import (
    CommonDomain,
    DirectSum,
    OperatorBetween,
    WeightedSpace,
    adjoint,
    adjoint_graph_check,
    dual_domain,
    operator_norm,
    orthogonal_projection,
    polar_decomposition,
    v_flip,
)


def _random_operator(seed, n1=2, n2=3):
    rng = np.random.default_rng(seed)
    h1 = WeightedSpace(n1, random_gram(rng, n1), "H1")
    h2 = WeightedSpace(n2, random_gram(rng, n2), "H2")
    return OperatorBetween(rng.standard_normal((n2, n1)), h1, h2), rng


def test_weighted_space_rejects_indefinite_gram():
    """Test Gram validation"""
    with pytest.raises(NotSPD):
        WeightedSpace(2, [[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(ValueError):
        WeightedSpace(3, np.eye(2))


def test_adjoint_is_gram_aware():
    """Test <T u, v>_2 = <u, T* v>_1"""
    t, rng = _random_operator(0)
    t_star = adjoint(t)
    u, v = rng.standard_normal(2), rng.standard_normal(3)
    assert t.codomain.inner(t.apply(u), v) == pytest.approx(t.domain.inner(u, t_star.apply(v)), rel=1e-10)
    np.testing.assert_allclose(adjoint(t_star).matrix, t.matrix, atol=1e-10)


def test_adjoint_graph_check_passes():
    """Test graph of T* against V(graph T)"""
    t, _ = _random_operator(1)
    checks = adjoint_graph_check(t)
    assert len(checks) == t.codomain.dim + 1
    assert all_passed(checks)


def test_v_flip_is_unitary():
    """Test V*V = I between the sum and the swapped sum"""
    t, _ = _random_operator(2)
    v = v_flip(DirectSum(t.domain, t.codomain))
    np.testing.assert_allclose((adjoint(v) @ v).matrix, np.eye(5), atol=1e-10)


def test_operator_norm_diagonal():
    """Test the norm of a Euclidean diagonal operator"""
    r = WeightedSpace.euclidean(3)
    t = OperatorBetween(np.diag([1.0, -4.0, 2.0]), r, r)
    assert operator_norm(t) == pytest.approx(4.0, rel=1e-12)


def test_operator_norm_matches_adjoint():
    """Test ||T|| = ||T*|| under weighted inner products"""
    t, _ = _random_operator(11, n1=3, n2=4)
    assert operator_norm(adjoint(t)) == pytest.approx(operator_norm(t), rel=1e-9)


def test_orthogonal_projection_is_selfadjoint_idempotent():
    """Test the Gram-orthogonal projection onto a random span"""
    rng = np.random.default_rng(5)
    space = WeightedSpace(4, random_gram(rng, 4))
    columns = rng.standard_normal((4, 2))
    p = orthogonal_projection(columns, space)
    np.testing.assert_allclose(p @ p, p, atol=1e-10)
    np.testing.assert_allclose(p @ columns, columns, atol=1e-10)
    # selfadjoint in the weighted inner product: G P = P^T G
    np.testing.assert_allclose(space.gram @ p, p.T @ space.gram, atol=1e-10)
    z = rng.standard_normal(4)
    w = z - p @ z
    assert abs(space.inner(w, columns[:, 1])) < 1e-10


def test_polar_decomposition():
    """Test T = W|T| with W a partial isometry"""
    t, _ = _random_operator(3, n1=3, n2=2)
    polar = polar_decomposition(t)
    assert all_passed(polar.residuals(t))


def test_dual_domain_of_degenerate_embedding():
    """Test D* when the first embedding has a kernel"""
    ambient = WeightedSpace.euclidean(2, "D")
    h = WeightedSpace.euclidean(2)
    cd = CommonDomain(
        2,
        np.eye(2),
        OperatorBetween([[1.0, 0.0], [0.0, 0.0]], ambient, h),
        OperatorBetween(np.eye(2), ambient, h),
    )
    assert not cd.dense_in_first
    basis = dual_domain(cd)
    assert basis.shape == (2, 1)
    np.testing.assert_allclose(np.abs(basis[:, 0]), [1.0, 0.0], atol=1e-12)


def test_same_coordinates_full_dual_domain():
    """Test D* is all of H2 when D is dense in both"""
    rng = np.random.default_rng(4)
    h1 = WeightedSpace(3, random_gram(rng, 3))
    h2 = WeightedSpace(3, random_gram(rng, 3))
    cd = CommonDomain.same_coordinates(h1, h2)
    assert cd.dense_in_first
    assert dual_domain(cd).shape == (3, 3)
    with pytest.raises(ValueError):
        CommonDomain.same_coordinates(h1, WeightedSpace.euclidean(2))
