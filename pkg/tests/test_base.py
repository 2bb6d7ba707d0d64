# -*- coding: utf-8 -*-
"""
Tests for base module
"""
import math

import numpy as np
import pytest
import sys
sys.path.append("..")
from opduality import config
from opduality.base import (
    Check,
    NotSPD,
    OpDualityError,
    ParseError,
    VerificationError,
    all_passed,
    as_matrix,
    failed,
    random_gram,
    require,
    residual_norm,
)


def test_check_passed():
    """Test pass flag against residual and tolerance"""
    assert Check("a", "x = x", 1e-12, 1e-10).passed
    assert Check("b", "x = x", 1e-10, 1e-10).passed
    assert not Check("c", "x = x", 2e-10, 1e-10).passed
    assert not Check("d", "x = x", math.nan, 1e-10).passed
    assert not Check("e", "x = x", math.inf, 1e-10).passed


def test_check_holds_builtin_types():
    """Test numpy scalars are stored as float and the flag is a bool"""
    check = Check("np", "x = x", np.float64(1e-12), np.float32(1e-10))
    assert type(check.residual) is float and type(check.tolerance) is float
    assert type(check.passed) is bool


def test_check_to_dict():
    """Test report row layout"""
    row = Check("projection_idempotent", "E^2 = E", 0.0, 1e-10).to_dict()
    assert list(row) == ["identity", "anchor", "residual", "tolerance", "pass"]
    assert row["pass"] is True


def test_require_raises():
    """Test require on a failing check"""
    ok = Check("ok", "", 0.0, 1.0)
    assert require(ok) is ok
    with pytest.raises(VerificationError) as info:
        require(Check("bad", "", 3.0, 1.0))
    assert info.value.residual == 3.0


def test_all_passed_and_failed():
    """Test helpers over check lists"""
    checks = [Check("a", "", 0.0, 1.0), Check("b", "", 2.0, 1.0)]
    assert not all_passed(checks)
    assert [c.name for c in failed(checks)] == ["b"]
    assert all_passed([])


def test_error_hierarchy():
    """Test every domain error derives from OpDualityError"""
    assert issubclass(NotSPD, OpDualityError)
    err = ParseError("bad token", 3, 7)
    assert err.line == 3 and err.column == 7
    assert "line 3" in str(err)


def test_as_matrix_and_residual():
    """Test input coercion"""
    assert as_matrix(2.0).shape == (1, 1)
    assert as_matrix([1.0, 2.0]).shape == (2, 1)
    with pytest.raises(ValueError):
        as_matrix([[1.0, np.nan]])
    assert residual_norm(np.zeros((0, 3))) == 0.0
    assert residual_norm([[3.0, 4.0]]) == pytest.approx(5.0)


def test_random_gram_is_spd():
    """Test random Gram matrices"""
    rng = np.random.default_rng(0)
    g = random_gram(rng, 5)
    np.testing.assert_allclose(g, g.T)
    assert np.linalg.eigvalsh(g).min() >= 1.0 - 1e-12


def test_tolerance_override():
    """Test set_tolerance and reset"""
    previous = config.set_tolerance("quadrature", 1e-3)
    try:
        assert config.tolerance("quadrature") == 1e-3
        assert previous == 1e-4
    finally:
        config.reset_tolerances()
    assert config.tolerance("quadrature") == 1e-4
    with pytest.raises(KeyError):
        config.set_tolerance("nonexistent", 1.0)
    with pytest.raises(ValueError):
        config.set_tolerance("cg", -1.0)
