# -*- coding: utf-8 -*-
"""
Tests for extensions module
"""
import numpy as np
import pytest
import sys
sys.path.append("..")
from opduality import config
from opduality.base import NotSemibounded, VerificationError, all_passed, random_spd
from opduality.extensions import (
    RestrictedOperator,
    SemiboundedForm,
    essential_selfadjointness_probe,
    form_correspondence,
    friedrichs_extension,
    friedrichs_in_krein_set,
    krein_membership,
    krein_order,
)
from opduality.hilbert_pair import OperatorBetween, WeightedSpace


def _operator(matrix):
    r = WeightedSpace.euclidean(len(matrix))
    return OperatorBetween(matrix, r, r)


def test_friedrichs_full_domain():
    """Test (JJ*)^-1 reproduces A on the full domain"""
    a = _operator(random_spd(np.random.default_rng(0), 4))
    fe = friedrichs_extension(RestrictedOperator.full(a))
    assert fe.kernel_dim == 0
    assert all_passed(fe.checks)
    np.testing.assert_allclose(fe.extension.matrix, a.matrix, atol=1e-8)


def test_friedrichs_on_subspace():
    """Test the extension of A = 2 on span(e1) inside R^2"""
    a = RestrictedOperator.on_subspace(_operator(np.diag([2.0, 5.0])), [[1.0], [0.0]])
    fe = friedrichs_extension(a)
    assert fe.kernel_dim == 1
    assert all_passed(fe.checks)
    np.testing.assert_allclose(fe.jj_star.matrix, np.diag([0.5, 0.0]), atol=1e-12)
    np.testing.assert_allclose(fe.extension.matrix, np.diag([2.0, 0.0]), atol=1e-12)
    assert not essential_selfadjointness_probe(a).dense


def test_friedrichs_from_form():
    """Test a form with q >= 1 goes through the same construction"""
    fe = friedrichs_extension(SemiboundedForm(WeightedSpace.euclidean(2), [[2.0, 1.0], [1.0, 3.0]]))
    np.testing.assert_allclose(fe.extension.matrix, [[2.0, 1.0], [1.0, 3.0]], atol=1e-10)


def test_semibounded_validation():
    """Test forms and operators below 1 are rejected"""
    with pytest.raises(NotSemibounded):
        SemiboundedForm(WeightedSpace.euclidean(2), np.diag([0.5, 2.0]))
    with pytest.raises(NotSemibounded):
        RestrictedOperator.full(_operator(np.diag([0.5, 1.0])))
    with pytest.raises(NotSemibounded):
        form_correspondence(_operator(np.diag([0.5, 1.0])))


def test_krein_set():
    """Test Krein membership and order"""
    a = RestrictedOperator.full(_operator(np.diag([2.0, 4.0])))
    assert friedrichs_in_krein_set(a).member
    outside = krein_membership(a, _operator(2.0 * np.eye(2)))
    assert not outside.member and outside.reasons
    assert krein_order(_operator(0.5 * np.eye(2)), _operator(np.eye(2)))
    assert not krein_order(_operator(np.eye(2)), _operator(0.5 * np.eye(2)))


def test_form_correspondence_round_trip():
    """Test A -> q -> (JJ*)^-1 returns A"""
    corr = form_correspondence(_operator(random_spd(np.random.default_rng(1), 3)))
    assert all_passed(corr.checks)


def test_essential_selfadjointness_full_domain():
    """Test A D is dense when D is everything"""
    report = essential_selfadjointness_probe(RestrictedOperator.full(_operator(np.diag([1.0, 3.0]))))
    assert report.dense and report.rank == 2


def test_friedrichs_rejects_inconsistent_operator(monkeypatch):
    """Test a non-symmetric A admitted by a loose tolerance fails JJ* A = I on D"""
    monkeypatch.setitem(config.TOLERANCES, "selfadjoint", 1.0)
    a = RestrictedOperator.full(_operator(np.array([[2.0, 0.5], [0.0, 2.0]])))
    with pytest.raises(VerificationError) as info:
        friedrichs_extension(a)
    assert "friedrichs_inverts_A" in str(info.value)
