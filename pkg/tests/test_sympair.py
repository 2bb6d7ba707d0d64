# -*- coding: utf-8 -*-
"""
Tests for sympair module
"""
import numpy as np
import pytest
import sys
sys.path.append("..")
from opduality.base import (
    DecompositionMismatch,
    GridTooCoarse,
    PairIncompatible,
    QNotAdmissible,
    SingularC12,
    all_passed,
    random_gram,
)
from opduality.hilbert_pair import OperatorBetween, WeightedSpace, adjoint
from opduality.sympair import (
    DecomposedElement,
    DefectModel,
    SymmetricPair,
    boundary_form,
    build_l,
    c_block_relation_check,
    defect_space,
    deficiency_indices,
    deficiency_isomorphisms,
    extension_action,
    gram_reflection,
    interval_defect_model,
    interval_sweep,
    l_symmetry_check,
    q_condition_check,
    random_gram_unitary,
)


def _finite_pair(seed, n1=3, n2=2):
    rng = np.random.default_rng(seed)
    h1 = WeightedSpace(n1, random_gram(rng, n1), "H1")
    h2 = WeightedSpace(n2, random_gram(rng, n2), "H2")
    a = OperatorBetween(rng.standard_normal((n2, n1)), h1, h2)
    return SymmetricPair(a, adjoint(a))


def test_build_l_is_symmetric():
    """Test L = [[0, B], [A, 0]] for a compatible pair"""
    pair = _finite_pair(0)
    assert pair.check().passed
    assert l_symmetry_check(build_l(pair)).passed


def test_incompatible_pair():
    """Test B != A* is rejected"""
    pair = _finite_pair(1)
    bad = SymmetricPair(pair.a, OperatorBetween(pair.b.matrix + 1.0, pair.second, pair.first))
    with pytest.raises(PairIncompatible):
        build_l(bad)


def test_finite_pair_has_no_defect():
    """Test A*B* = A*A has no eigenvalue -1"""
    pair = _finite_pair(2)
    report = defect_space(pair)
    assert report.dim == 0 and report.indices == (0, 0)
    assert report.nearest_distance >= 1.0 - 1e-9
    assert deficiency_indices(pair) == (0, 0)


def test_interval_model_gram():
    """Test the Gram of e^x, e^-x on (0, 1)"""
    model = interval_defect_model(256)
    expected = np.array([[(np.e ** 2 - 1) / 2, 1.0], [1.0, (1 - np.e ** -2) / 2]])
    np.testing.assert_allclose(model.gram, expected, rtol=1e-8)
    assert model.indices == (2, 2)
    assert all_passed(model.checks)


def test_interval_model_validation():
    """Test grid and interval arguments"""
    with pytest.raises(ValueError):
        interval_defect_model(8)
    with pytest.raises(ValueError):
        interval_defect_model(64, (1.0, 1.0))
    with pytest.raises(GridTooCoarse):
        interval_defect_model(16, (-40.0, 40.0))


def test_interval_sweep_loses_both_solutions():
    """Test e^x and e^-x leave L^2 as the interval grows"""
    report = interval_sweep()
    assert [row["radius"] for row in report.rows] == [float(r) for r in range(1, 9)]
    assert all(row["dim_at_infinity"] == 0 for row in report.rows if row["radius"] >= 6)
    assert report.indices == (0, 0)
    with pytest.raises(ValueError):
        interval_sweep([2.0, 1.0])


def test_deficiency_isomorphisms():
    """Test phi and psi land in the -i and +i eigenspaces of L*"""
    iso = deficiency_isomorphisms(interval_defect_model(128))
    assert len(iso.checks) == 3
    assert all_passed(iso.checks)


def test_q_condition_and_boundary_form():
    """Test admissible Q make the boundary form vanish"""
    model = interval_defect_model(128)
    rng = np.random.default_rng(3)
    q = random_gram_unitary(rng, model.gram)
    assert q_condition_check(model, q).passed
    assert q_condition_check(model, gram_reflection(model.gram, [1.0, 2.0])).passed
    assert not q_condition_check(model, 2.0 * np.eye(2)).passed
    u = rng.standard_normal(2)
    assert abs(boundary_form(model, u, q @ u)) < 1e-9 * (1 + np.abs(model.gram).max() * (u @ u))
    assert abs(boundary_form(model, u, 2.0 * u)) > 1e-3


def test_extension_action_validation():
    """Test Q admissibility and v = Q u are enforced"""
    model = interval_defect_model(128)
    pair = _finite_pair(4)
    element = DecomposedElement(np.ones(3), np.ones(2), np.array([1.0, 0.0]), np.array([1.0, 0.0]))
    value = extension_action(pair, model, np.eye(2), element)
    np.testing.assert_allclose(value.regular, np.concatenate([pair.b.matrix @ np.ones(2), pair.a.matrix @ np.ones(3)]))
    assert abs(value.boundary_form) < 1e-9
    np.testing.assert_allclose(value.defect.stacked(), 0.0, atol=1e-12)
    with pytest.raises(QNotAdmissible):
        extension_action(pair, model, 2.0 * np.eye(2), element)
    with pytest.raises(DecompositionMismatch):
        extension_action(pair, model, -np.eye(2), element)


def test_c_block_relation():
    """Test the C-block relation and a singular C12"""
    model = interval_defect_model(128)
    eye, zero = np.eye(2), np.zeros((2, 2))
    report = c_block_relation_check(model, eye, eye, eye, zero, eye)
    assert report.residual == pytest.approx(0.0, abs=1e-12)
    assert not report.pseudo_inverse
    singular = c_block_relation_check(model, eye, eye, zero, zero, eye)
    assert singular.pseudo_inverse
    with pytest.raises(SingularC12):
        c_block_relation_check(model, eye, eye, zero, zero, eye, strict=True)


def test_interval_model_actions_are_assembled():
    """Test BB* and A*B* come from the Chebyshev derivatives, close to I and -I"""
    model = interval_defect_model(256)
    np.testing.assert_allclose(model.bb_star_action, np.eye(2), atol=1e-8)
    np.testing.assert_allclose(model.ab_star_action, -np.eye(2), atol=1e-8)
    np.testing.assert_allclose(model.b_star_action, -np.eye(2), atol=1e-8)


def test_deficiency_residual_tracks_defect_action():
    """Test the -i and +i residuals measure (I + A*B*) on the model"""
    iso = deficiency_isomorphisms(DefectModel(1, [[1.0]], [[1.0]], ab_star_action=[[-1.5]]))
    minus, plus, injective = iso.checks
    assert minus.residual == pytest.approx(0.5) and not minus.passed
    assert plus.residual == pytest.approx(0.5) and not plus.passed
    assert injective.passed
    model = interval_defect_model(128)
    expected = np.linalg.norm(np.eye(2) + model.ab_star_action, axis=0).max()
    assert deficiency_isomorphisms(model).checks[0].residual == pytest.approx(expected, abs=1e-13)


def test_unit_model_isomorphisms_are_exact():
    """Test BB* = I, Gram = I, dim 1: phi(1) = (1; -i) with eigenvalue -i"""
    iso = deficiency_isomorphisms(DefectModel(1, [[1.0]], [[1.0]]))
    phi = iso.phi([1.0])
    np.testing.assert_allclose(phi.real, [1.0, 0.0])
    np.testing.assert_allclose(phi.imag, [0.0, -1.0])
    assert all(c.residual == 0.0 for c in iso.checks[:2])


def test_extension_value_combined():
    """Test regular and defect parts are added in H1 + H2 coordinates"""
    model = interval_defect_model(128)
    pair = _finite_pair(5)
    q = gram_reflection(model.gram, [1.0, 2.0])
    u = np.array([1.0, 0.0])
    element = DecomposedElement(np.ones(3), np.zeros(2), u, q @ u)
    value = extension_action(pair, model, q, element)
    np.testing.assert_allclose(value.defect.imag[:2], u - q @ u, atol=1e-12)
    e1 = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    e2 = np.eye(2)
    total = value.combined(e1, e2)
    np.testing.assert_allclose(total.real, value.regular + np.concatenate([e1 @ value.defect.real[:2],
                                                                         e2 @ value.defect.real[2:]]))
    np.testing.assert_allclose(total.imag[:3], e1 @ (u - q @ u), atol=1e-12)
    assert abs(value.boundary_form) < 1e-9
    with pytest.raises(ValueError):
        value.combined(np.eye(2), e2)
