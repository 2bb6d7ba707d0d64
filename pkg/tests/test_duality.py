# -*- coding: utf-8 -*-
"""
Tests for duality module
"""
import numpy as np
import pytest
import sys
sys.path.append("..")
from opduality.base import NotClosable, NotDense, NotIntertwining, NotUnitary, all_passed, random_gram
from opduality.duality import (
    DiscreteMeasureSpace,
    discrete_common_domain,
    dual_domain_is_full,
    duality_operator,
    kernel_complement_check,
    partial_isometry_checks,
    partial_isometry_k,
    radon_nikodym,
    reflection_hat,
    schwarz_bounds,
    spectral_measure,
)
from opduality.hilbert_pair import CommonDomain, OperatorBetween, WeightedSpace


def _discrete(w1, w2):
    points = tuple("abcdefgh"[: len(w1)])
    return DiscreteMeasureSpace(points, w1), DiscreteMeasureSpace(points, w2)


def _random_domain(seed, dim=4):
    rng = np.random.default_rng(seed)
    return CommonDomain.same_coordinates(
        WeightedSpace(dim, random_gram(rng, dim), "H1"), WeightedSpace(dim, random_gram(rng, dim), "H2")
    )


def test_delta_is_radon_nikodym():
    """Test Delta of two discrete measures is multiplication by dmu2/dmu1"""
    mu1, mu2 = _discrete([1.0, 2.0, 1.0], [2.0, 1.0, 0.0])
    delta = duality_operator(discrete_common_domain(mu1, mu2))
    np.testing.assert_allclose(np.diag(delta.matrix), [2.0, 0.5, 0.0], atol=1e-12)
    np.testing.assert_allclose(radon_nikodym(mu1, mu2), [2.0, 0.5, 0.0])
    assert dual_domain_is_full(discrete_common_domain(mu1, mu2))


def test_non_absolutely_continuous_measures():
    """Test mu2 charging a mu1-null point"""
    mu1, mu2 = _discrete([1.0, 0.0], [1.0, 1.0])
    with pytest.raises(NotClosable):
        radon_nikodym(mu1, mu2)
    with pytest.raises(NotClosable):
        duality_operator(discrete_common_domain(mu1, mu2))


def test_delta_requires_dense_domain():
    """Test a domain that misses a direction of H1"""
    h = WeightedSpace.euclidean(2)
    cd = CommonDomain.same_coordinates(h, h, basis=[[1.0], [0.0]])
    with pytest.raises(NotDense):
        duality_operator(cd)


def test_spectral_measure_moments():
    """Test atoms, total mass and first moment of a discrete spectral measure"""
    mu1, mu2 = _discrete([1.0, 2.0, 1.0], [2.0, 1.0, 0.0])
    delta = duality_operator(discrete_common_domain(mu1, mu2))
    measure = spectral_measure(delta, [1.0, 1.0, 1.0])
    values = [lam for lam, _ in measure.atoms]
    masses = [m for _, m in measure.atoms]
    np.testing.assert_allclose(values, [0.0, 0.5, 2.0], atol=1e-12)
    np.testing.assert_allclose(masses, [1.0, 2.0, 1.0], atol=1e-12)
    assert all_passed(measure.moment_checks(4.0, 3.0))
    assert spectral_measure(delta, np.zeros(3)).atoms == ()


def test_random_duality_and_partial_isometry():
    """Test energy identity, ker(J*) and K on random weighted spaces"""
    for seed in range(3):
        cd = _random_domain(seed)
        delta = duality_operator(cd)
        assert np.linalg.eigvalsh(cd.first.gram @ delta.matrix).min() > 0
        assert kernel_complement_check(cd).passed
        assert all_passed(partial_isometry_checks(cd, partial_isometry_k(cd)))


def test_reflection_and_schwarz_bounds():
    """Test U_hat for a diagonal reflection commuting with Delta"""
    mu1, mu2 = _discrete([1.0, 1.0], [1.0, 3.0])
    cd = discrete_common_domain(mu1, mu2)
    u = OperatorBetween(np.diag([1.0, -1.0]), cd.first, cd.first)
    u_hat = reflection_hat(cd, u)
    np.testing.assert_allclose(u_hat.matrix, np.diag([1.0, -1.0]), atol=1e-12)
    trace = schwarz_bounds(cd, u, [1.0, 1.0], steps=4)
    assert trace.value == pytest.approx(2.0)
    assert trace.limit == pytest.approx(4.0)
    assert trace.check().passed


def test_reflection_input_validation():
    """Test non-unitary and non-intertwining U"""
    mu1, mu2 = _discrete([1.0, 1.0], [1.0, 3.0])
    cd = discrete_common_domain(mu1, mu2)
    with pytest.raises(NotUnitary):
        reflection_hat(cd, OperatorBetween(2.0 * np.eye(2), cd.first, cd.first))
    with pytest.raises(NotIntertwining):
        reflection_hat(cd, OperatorBetween([[0.0, -1.0], [1.0, 0.0]], cd.first, cd.first))
