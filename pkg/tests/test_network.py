# -*- coding: utf-8 -*-
"""
Tests for network module
"""
import numpy as np
import pytest
import sys
sys.path.append("..")
from opduality.base import NonpositiveConductance, NotConnected, SameAsBase, VertexMissing, all_passed
from opduality.network import (
    Network,
    big_l_selfadjointness_probe,
    delta_identity_check,
    dipole,
    dipole_matrix,
    dipole_reproducing_check,
    effective_resistance,
    energy_inner,
    energy_space,
    finite_energy_closure_check,
    kl_pair,
    laplacian_apply,
    laplacian_matrix,
    laplacian_sparse,
    network_duality,
    network_essential_selfadjointness,
    norm_comparability_probe,
    random_network,
    selfadjoint_products,
    sqrt2_bound_check,
)


def _p3():
    return Network(("0", "1", "2"), (("0", "1", 1.0), ("1", "2", 1.0)), "0", name="p3")


def test_network_validation():
    """Test malformed networks are rejected"""
    with pytest.raises(VertexMissing):
        Network(("0", "1"), (("0", "2", 1.0),), "0")
    with pytest.raises(VertexMissing):
        Network(("0", "1"), (("0", "1", 1.0),), "9")
    with pytest.raises(NonpositiveConductance):
        Network(("0", "1"), (("0", "1", 0.0),), "0")
    with pytest.raises(NotConnected):
        Network(("0", "1", "2"), (("0", "1", 1.0),), "0")
    with pytest.raises(ValueError):
        Network(("0", "1"), (("0", "0", 1.0),), "0")
    with pytest.raises(ValueError):
        Network(("0", "1"), (("0", "1", 1.0), ("1", "0", 2.0)), "0")


def test_conductances_and_laplacian():
    """Test c(x) and the Laplacian of P3"""
    n = _p3()
    np.testing.assert_allclose(n.conductances(), [1.0, 2.0, 1.0])
    expected = [[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]]
    np.testing.assert_allclose(laplacian_matrix(n).toarray(), expected)
    np.testing.assert_allclose(laplacian_sparse(n).to_dense(), expected)
    np.testing.assert_allclose(laplacian_apply(n, {"1": 1.0}), [-1.0, 2.0, -1.0])
    assert energy_inner(n, [0.0, 1.0, 2.0], [0.0, 1.0, 2.0]) == pytest.approx(2.0)


def test_p3_dipoles():
    """Test v1 = (0, 1, 1) and v2 = (0, 1, 2)"""
    n = _p3()
    np.testing.assert_allclose(dipole(n, "1"), [0.0, 1.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(dipole(n, "2"), [0.0, 1.0, 2.0], atol=1e-12)
    np.testing.assert_allclose(dipole_matrix(n), [[1.0, 1.0], [1.0, 2.0]], atol=1e-12)
    assert effective_resistance(n, "0", "2") == pytest.approx(2.0)
    assert effective_resistance(n, "1", "1") == 0.0
    with pytest.raises(SameAsBase):
        dipole(n, "0")


def test_energy_space_pinning():
    """Test H_E inner products through pinned coordinates"""
    n = _p3()
    es = energy_space(n)
    np.testing.assert_allclose(es.pin([3.0, 4.0, 6.0]), [1.0, 3.0])
    np.testing.assert_allclose(es.unpin([1.0, 3.0]), [0.0, 1.0, 3.0])
    assert es.inner(dipole(n, "1"), dipole(n, "2")) == pytest.approx(1.0)


def test_dipole_identities_on_random_networks():
    """Test reproducing property and delta expansion"""
    rng = np.random.default_rng(0)
    n = random_network(rng, 12, extra_edges=6)
    for x in n.free_vertices[:4]:
        assert dipole_reproducing_check(n, x, rng).passed
        assert delta_identity_check(n, x).passed
    assert delta_identity_check(n, n.base).passed


def test_sqrt2_bound():
    """Test |<phi, v_x>_E| <= sqrt(2) ||phi||, attained at delta_x - delta_o"""
    report = sqrt2_bound_check(_p3(), "2", trials=200, rng=np.random.default_rng(1))
    assert report.attained == pytest.approx(np.sqrt(2.0))
    assert all_passed(report.checks())


def test_kl_pair_and_products():
    """Test the K/L pair tables and the selfadjoint products"""
    n = _p3()
    kl = kl_pair(n)
    assert all_passed(kl.checks)
    products = selfadjoint_products(n, kl)
    assert all_passed(products.checks)
    np.testing.assert_allclose(products.k_star_k, laplacian_matrix(n).toarray(), atol=1e-12)


def test_big_l_has_zero_indices():
    """Test finite networks give deficiency indices (0, 0)"""
    report = big_l_selfadjointness_probe(random_network(np.random.default_rng(2), 8, extra_edges=3))
    assert report.indices == (0, 0)
    assert all_passed(report.checks)


def test_network_duality_is_laplacian():
    """Test Delta of (l2, H_E) and the spectral moments at delta_x"""
    nd = network_duality(_p3())
    assert all_passed(nd.checks)
    assert len(nd.checks) == 1 + 2 * 3
    assert network_essential_selfadjointness(_p3()).dense
    assert all_passed(finite_energy_closure_check(_p3()))


def test_norm_comparability():
    """Test ||delta_x||_E^2 = c(x) and the reverse dipole ratio on P3"""
    probe = norm_comparability_probe(_p3())
    assert probe.max_conductance == pytest.approx(2.0)
    assert probe.argmax == "1"
    assert probe.reverse_ratio == pytest.approx(2.5)
    assert probe.check().passed


def test_random_network_is_connected():
    """Test generated networks"""
    n = random_network(np.random.default_rng(3), 20, extra_edges=5)
    assert len(n) == 20 and n.base == "0"
    assert len(n.edges) >= 19
    assert np.all(n.edge_conductances > 0)
    with pytest.raises(ValueError):
        random_network(np.random.default_rng(3), 0)
