# -*- coding: utf-8 -*-
"""
Tests for formats module
"""
import numpy as np
import pytest
import sys
sys.path.append("..")
from opduality.base import NonpositiveConductance, ParseError
from opduality.formats import (
    emit_matrix,
    loads_interval,
    loads_matrix,
    loads_network,
    loads_pair,
    parse_network,
    write_network,
)
from opduality.network import random_network

P3_TEXT = """# path on three vertices
network p3
base 0

edge 0 1 1
edge 1 2 1
"""


def test_loads_network():
    """Test the network format with comments and blank lines"""
    n = loads_network(P3_TEXT)
    assert n.name == "p3" and n.base == "0"
    assert n.vertices == ("0", "1", "2")
    assert n.edges == (("0", "1", 1.0), ("1", "2", 1.0))


def test_single_vertex_network():
    """Test a network with no edges"""
    n = loads_network("network point\nbase a\n")
    assert n.vertices == ("a",) and n.edges == ()


def test_network_parse_errors():
    """Test line and column of malformed network files"""
    with pytest.raises(ParseError) as info:
        loads_network("network p\nbase 0\nedge 0 1 one\n")
    assert info.value.line == 3 and info.value.column == 10
    with pytest.raises(ParseError) as info:
        loads_network("network p\nbase 0\nedge 0 1 1\nedge 1 0 2\n")
    assert info.value.line == 4
    with pytest.raises(ParseError):
        loads_network("network p\nbase 0\nedge 0 0 1\n")
    with pytest.raises(ParseError):
        loads_network("base 0\nnetwork p\n")
    with pytest.raises(ParseError):
        loads_network("network p\nbase 0\nwire 0 1 1\n")
    with pytest.raises(ParseError):
        loads_network("")
    with pytest.raises(NonpositiveConductance):
        loads_network("network p\nbase 0\nedge 0 1 -1\n")


def test_write_and_parse_network(tmp_path):
    """Test a generated network survives the file format"""
    n = random_network(np.random.default_rng(0), 10, extra_edges=4)
    path = tmp_path / "random.net"
    write_network(n, path)
    back = parse_network(path)
    assert set(back.vertices) == set(n.vertices)
    assert {frozenset((u, v)): c for u, v, c in back.edges} == {frozenset((u, v)): c for u, v, c in n.edges}


def test_loads_matrix():
    """Test matrix and gram headers"""
    kind, m = loads_matrix("matrix 2 3\n1 2 3\n4 5 6\n")
    assert kind == "matrix" and m.shape == (2, 3)
    kind, g = loads_matrix(emit_matrix(np.eye(2), kind="gram"))
    assert kind == "gram"
    np.testing.assert_allclose(g, np.eye(2))
    kind, scalar = loads_matrix("matrix 1 1\n2\n")
    assert scalar[0, 0] == 2.0


def test_matrix_parse_errors():
    """Test short rows, missing rows and trailing content"""
    with pytest.raises(ParseError):
        loads_matrix("matrix 2 2\n1 2\n3\n")
    with pytest.raises(ParseError):
        loads_matrix("matrix 2 2\n1 2\n")
    with pytest.raises(ParseError):
        loads_matrix("gram 1\n1\n2\n")
    with pytest.raises(ParseError):
        loads_matrix("matrix 1 1\nnan\n")
    with pytest.raises(ParseError):
        loads_matrix("vector 2\n1 2\n")


def test_loads_pair():
    """Test two Gram blocks with an optional basis"""
    text = "pair\ngram 2\n1 0\n0 1\ngram 2\n2 0\n0 3\n"
    cd = loads_pair(text)
    assert cd.first.dim == 2 and cd.basis.shape == (2, 2)
    cd = loads_pair(text + "basis 2 1\n1\n0\n")
    assert cd.basis.shape == (2, 1)
    with pytest.raises(ParseError):
        loads_pair("pair\ngram 2\n1 0\n0 1\ngram 1\n1\n")
    with pytest.raises(ParseError):
        loads_pair(text + "basis 3 1\n1\n0\n0\n")


def test_loads_interval():
    """Test interval job defaults and overrides"""
    job = loads_interval("")
    assert job.interval == (0.0, 1.0) and job.grid == 256 and len(job.sweep) == 8
    job = loads_interval("interval -1 2\ngrid 128\nsweep 1,2,4\n")
    assert job.interval == (-1.0, 2.0) and job.grid == 128 and job.sweep == (1.0, 2.0, 4.0)
    with pytest.raises(ParseError):
        loads_interval("interval 2 1\n")
    with pytest.raises(ParseError):
        loads_interval("sweep 1,-2\n")
