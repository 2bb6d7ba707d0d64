# -*- coding: utf-8 -*-
"""
Tests for exhaustion module
"""
import numpy as np
import pytest
import sys
sys.path.append("..")
from opduality.base import VertexMissing, all_passed
from opduality.exhaustion import (
    WIRED_LABEL,
    ExhaustionFamily,
    binary_tree_family,
    binary_tree_network,
    exhaustion_harmonics,
    lattice_family,
    lattice_network,
    make_family,
    norm_comparability_trend,
    path_family,
    path_network,
    spectral_growth,
    wired,
)


def test_wired_merges_boundary():
    """Test boundary vertices collapse and parallel edges add"""
    n, boundary = binary_tree_network(2)
    w = wired(n, boundary)
    assert set(w.vertices) == {"0", "1", "2", WIRED_LABEL}
    weights = {frozenset((u, v)): c for u, v, c in w.edges}
    assert weights[frozenset(("1", WIRED_LABEL))] == pytest.approx(2.0)
    assert wired(n, frozenset()) is n


def test_generators():
    """Test sizes and boundaries of the generators"""
    path, path_boundary = path_network(4)
    assert len(path) == 5 and path_boundary == {"4"}
    lattice, ring = lattice_network(2)
    assert len(lattice) == 25 and len(ring) == 16
    assert lattice.base == "0,0"
    tree, leaves = binary_tree_network(3, ratio=2.0)
    assert len(tree) == 15 and len(leaves) == 8
    assert max(c for _, _, c in tree.edges) == pytest.approx(4.0)


def test_family_must_be_nested():
    """Test levels that shrink are rejected"""
    big, b1 = path_network(4)
    small, b2 = path_network(2)
    with pytest.raises(ValueError):
        ExhaustionFamily("path_n", (big, small), (b1, b2), (4, 2))


def test_path_gap_vanishes():
    """Test the half-line has R_free = R_wired"""
    report = exhaustion_harmonics(path_family((8, 16, 32)))
    assert report.vanishing
    np.testing.assert_allclose([r.r_free for r in report.rows], 1.0)
    assert all_passed(report.checks)


def test_binary_tree_gap_persists():
    """Test R_free - R_wired decreases towards 1/4 on the binary tree"""
    report = exhaustion_harmonics(binary_tree_family((2, 3, 4, 5, 6)))
    assert report.rows[0].gap == pytest.approx(1.0 / 3.0)
    assert report.monotone
    assert not report.vanishing
    assert np.all(report.gaps > 0.25)
    assert all_passed(report.checks)


def test_lattice_rayleigh_monotone():
    """Test wiring never increases resistance on Z^2 boxes"""
    report = exhaustion_harmonics(lattice_family((2, 4)), workers=2)
    assert all_passed(report.checks)
    assert report.monotone


def test_missing_vertex():
    """Test a pair vertex absent from a level"""
    with pytest.raises(VertexMissing):
        exhaustion_harmonics(path_family((2, 4)), x="0", y="3")


def test_spectral_growth_bracket():
    """Test max c <= lambda_max <= 2 max c per level"""
    rows, checks = spectral_growth(binary_tree_family((3, 4, 5), ratio=2.0))
    assert all_passed(checks)
    tops = [r.max_conductance for r in rows]
    np.testing.assert_allclose(np.array(tops[1:]) / np.array(tops[:-1]), 2.0)


def test_norm_comparability_trend_doubles():
    """Test max c(x) doubles with depth when conductances double"""
    rows = norm_comparability_trend(binary_tree_family(range(2, 7), ratio=2.0))
    tops = np.array([r.max_conductance for r in rows])
    np.testing.assert_allclose(tops[1:] / tops[:-1], 2.0)
    assert all(r.reverse_ratio > 0 for r in rows)


def test_make_family():
    """Test family names from the command line"""
    assert make_family("path_n").params == (8, 16, 32)
    tree = make_family("binary_tree:5:2")
    assert tree.params == (4, 5) and tree.generator == "binary_tree:2"
    assert make_family("lattice2d_n", [2]).params == (2,)
    with pytest.raises(ValueError):
        make_family("binary_tree:x")
    with pytest.raises(ValueError):
        make_family("torus")
