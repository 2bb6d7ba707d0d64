# -*- coding: utf-8 -*-
"""
@author:XuMing(xuming624@qq.com)
@description: Resistor networks, graph Laplacians and the energy Hilbert space.

A connected network (V, E, c) with base vertex o. Functions on V mod constants form H_E with
<u, v>_E = sum over edges c_xy (u(x) - u(y)) (v(x) - v(y)), modelled by pinning u(o) = 0 so the
grounded Laplacian is the Gram. Dipoles v_x solve Delta v = delta_x - delta_o.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
import scipy.sparse

from opduality import config
from opduality.base import (
    Check,
    NonpositiveConductance,
    NotConnected,
    SameAsBase,
    VertexMissing,
    residual_norm,
)
from opduality.config import tolerance
from opduality.duality import duality_operator, spectral_measure
from opduality.extensions import RestrictedOperator, essential_selfadjointness_probe
from opduality.hilbert_pair import CommonDomain, OperatorBetween, WeightedSpace, adjoint
from opduality.linalg import SparseSymmetric, gram_rank, solve_dense_spd, solve_spd, sym_eigen
from opduality.log import logger
from opduality.sympair import SymmetricPair, build_l, defect_space, deficiency_indices, l_symmetry_check

Edge = Tuple[str, str, float]
VertexFunction = Union[Sequence[float], np.ndarray, Mapping[str, float]]


@dataclass(frozen=True, eq=False)
class Network:
    """Connected resistor network; edges are stored once, conductances are positive."""
    vertices: Tuple[str, ...]
    edges: Tuple[Edge, ...]
    base: str
    name: str = "network"
    _index: Dict[str, int] = field(init=False, repr=False)
    _ends: np.ndarray = field(init=False, repr=False)
    _weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        vertices = tuple(str(v) for v in self.vertices)
        if len(set(vertices)) != len(vertices):
            raise ValueError("Duplicate vertex labels")
        index = {v: i for i, v in enumerate(vertices)}
        edges = []
        seen = set()
        for u, v, c in self.edges:
            u, v, c = str(u), str(v), float(c)
            for w in (u, v):
                if w not in index:
                    raise VertexMissing(f"Edge endpoint '{w}' is not a vertex")
            if u == v:
                raise ValueError(f"Self-loop at '{u}'")
            key = frozenset((u, v))
            if key in seen:
                raise ValueError(f"Duplicate edge {u}-{v}")
            if not c > 0:
                raise NonpositiveConductance(f"Edge {u}-{v} has conductance {c}", residual=c)
            seen.add(key)
            edges.append((u, v, c))
        base = str(self.base)
        if base not in index:
            raise VertexMissing(f"Base vertex '{base}' is not a vertex")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "_index", index)
        ends = np.array([(index[u], index[v]) for u, v, _ in edges], dtype=int).reshape(-1, 2)
        object.__setattr__(self, "_ends", ends)
        object.__setattr__(self, "_weights", np.array([c for _, _, c in edges], dtype=float))
        if vertices and not nx.is_connected(self.graph()):
            raise NotConnected(f"Network '{self.name}' has {nx.number_connected_components(self.graph())} components")

    def __len__(self) -> int:
        return len(self.vertices)

    def index(self, label) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise VertexMissing(f"Vertex '{label}' not in network '{self.name}'") from None

    def graph(self) -> nx.Graph:
        g = nx.Graph(name=self.name)
        g.add_nodes_from(self.vertices)
        g.add_weighted_edges_from(self.edges, weight="c")
        return g

    def conductance_at(self, x) -> float:
        """c(x), the sum of conductances at x."""
        return float(self.conductances()[self.index(x)])

    def conductances(self) -> np.ndarray:
        """c(x) for every vertex, in vertex order."""
        return (np.bincount(self._ends[:, 0], self._weights, len(self))
                + np.bincount(self._ends[:, 1], self._weights, len(self)))

    def edge_differences(self, u: np.ndarray) -> np.ndarray:
        """u(x) - u(y) along every stored edge (x, y)."""
        return u[self._ends[:, 0]] - u[self._ends[:, 1]]

    @property
    def edge_conductances(self) -> np.ndarray:
        return self._weights

    def neighbors(self, x) -> List[Tuple[str, float]]:
        label = self.vertices[self.index(x)]
        out = []
        for u, v, c in self.edges:
            if u == label:
                out.append((v, c))
            elif v == label:
                out.append((u, c))
        return out

    @property
    def free_vertices(self) -> Tuple[str, ...]:
        """V minus the base, the coordinate labels of H_E."""
        return tuple(v for v in self.vertices if v != self.base)

    def function(self, u: VertexFunction) -> np.ndarray:
        """Vertex function as an array ordered like `vertices`."""
        if isinstance(u, Mapping):
            out = np.zeros(len(self))
            for label, value in u.items():
                out[self.index(label)] = float(value)
            return out
        arr = np.asarray(u, dtype=float).reshape(-1)
        if arr.shape[0] != len(self):
            raise ValueError(f"Vertex function has {arr.shape[0]} values for {len(self)} vertices")
        return arr

    def delta(self, x) -> np.ndarray:
        out = np.zeros(len(self))
        out[self.index(x)] = 1.0
        return out


# ============ Laplacians ============

def laplacian_sparse(n: Network) -> SparseSymmetric:
    entries: Dict[Tuple[int, int], float] = {}
    for u, v, c in n.edges:
        i, j = sorted((n.index(u), n.index(v)))
        entries[(i, i)] = entries.get((i, i), 0.0) + c
        entries[(j, j)] = entries.get((j, j), 0.0) + c
        entries[(i, j)] = -c
    return SparseSymmetric(len(n), tuple((i, j, val) for (i, j), val in sorted(entries.items())))


def laplacian_matrix(n: Network) -> scipy.sparse.csr_matrix:
    """Graph Laplacian in the vertex order of the network."""
    return scipy.sparse.csr_matrix(nx.laplacian_matrix(n.graph(), nodelist=list(n.vertices), weight="c"),
                                   dtype=float)


def grounded_laplacian(n: Network) -> SparseSymmetric:
    """Laplacian with the base row and column deleted."""
    keep = [i for i, v in enumerate(n.vertices) if v != n.base]
    reduced = laplacian_sparse(n).to_csr()[keep][:, keep]
    coo = scipy.sparse.triu(reduced).tocoo()
    return SparseSymmetric(len(keep), tuple(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist())))


def laplacian_apply(n: Network, u: VertexFunction) -> np.ndarray:
    """(Delta u)(x) = sum_{y ~ x} c_xy (u(x) - u(y))."""
    return laplacian_sparse(n).to_csr() @ n.function(u)


def energy_inner(n: Network, u: VertexFunction, v: VertexFunction) -> float:
    """<u, v>_E, each undirected edge counted once."""
    du = n.edge_differences(n.function(u))
    dv = n.edge_differences(n.function(v))
    return float(np.sum(n.edge_conductances * du * dv))


def pinning_map(n: Network) -> np.ndarray:
    """K: u -> (u(x) - u(o)) for x != o, the H_E coordinates of a vertex function."""
    k = np.zeros((len(n) - 1, len(n)))
    o = n.index(n.base)
    for row, x in enumerate(n.free_vertices):
        k[row, n.index(x)] = 1.0
        k[row, o] = -1.0
    return k


@dataclass(frozen=True, eq=False)
class EnergySpace:
    network: Network
    gram: SparseSymmetric

    @property
    def space(self) -> WeightedSpace:
        return WeightedSpace(self.gram.dim, self.gram.to_dense(), "H_E")

    def pin(self, u: VertexFunction) -> np.ndarray:
        return pinning_map(self.network) @ self.network.function(u)

    def unpin(self, w) -> np.ndarray:
        out = np.zeros(len(self.network))
        for value, x in zip(np.asarray(w, dtype=float), self.network.free_vertices):
            out[self.network.index(x)] = value
        return out

    def inner(self, u: VertexFunction, v: VertexFunction) -> float:
        return float(self.pin(u) @ (self.gram.to_csr() @ self.pin(v)))


def energy_space(n: Network) -> EnergySpace:
    return EnergySpace(n, grounded_laplacian(n))


# ============ Dipoles ============

def dipole(n: Network, x) -> np.ndarray:
    """v_x with Delta v_x = delta_x - delta_o and v_x(o) = 0."""
    if n.vertices[n.index(x)] == n.base:
        raise SameAsBase(f"Dipole requested at the base vertex '{n.base}'")
    rhs = n.delta(x) - n.delta(n.base)
    if len(n) <= config.DENSE_SOLVE_MAX_DIM:
        es = energy_space(n)
        return es.unpin(solve_dense_spd(es.gram.to_dense(), pinning_map(n) @ n.delta(x)))
    return solve_spd(laplacian_sparse(n), rhs, pin=n.index(n.base))


def dipole_matrix(n: Network) -> np.ndarray:
    """Pinned dipoles as columns, one per free vertex: L_g^-1."""
    if len(n) <= 1:
        return np.zeros((0, 0))
    g = grounded_laplacian(n).to_dense()
    return solve_dense_spd(g, np.eye(g.shape[0]))


def effective_resistance(n: Network, x, y) -> float:
    """R(x, y) = v(x) - v(y) for Delta v = delta_x - delta_y."""
    i, j = n.index(x), n.index(y)
    if i == j:
        return 0.0
    rhs = n.delta(x) - n.delta(y)
    if len(n) <= config.DENSE_SOLVE_MAX_DIM:
        keep = np.arange(len(n)) != j
        lap = laplacian_matrix(n).toarray()[keep][:, keep]
        v = np.zeros(len(n))
        v[keep] = solve_dense_spd(lap, rhs[keep])
    else:
        v = solve_spd(laplacian_sparse(n), rhs, pin=j)
    return float(v[i] - v[j])


def dipole_reproducing_check(n: Network, x, rng: np.random.Generator, trials: int = 10) -> Check:
    """f(x) - f(o) = <v_x, f>_E for random f."""
    v = dipole(n, x)
    i, o = n.index(x), n.index(n.base)
    worst = 0.0
    for _ in range(trials):
        f = rng.standard_normal(len(n))
        worst = max(worst, abs(energy_inner(n, v, f) - (f[i] - f[o])) / max(np.abs(f).max(), 1.0))
    return Check(f"dipole_reproducing[{x}]", "f(x) - f(o) = <v_x, f>_E", worst, 1e-9)


def delta_identity_check(n: Network, x) -> Check:
    """delta_x = c(x) v_x - sum_{y ~ x} c_xy v_y in H_E, with v_o = 0."""
    def v(label):
        return np.zeros(len(n)) if label == n.base else dipole(n, label)

    label = n.vertices[n.index(x)]
    combo = n.conductance_at(label) * v(label)
    for y, c in n.neighbors(label):
        combo = combo - c * v(y)
    diff = n.delta(label) - combo
    return Check(f"delta_identity[{label}]", "delta_x = c(x) v_x - sum c_xy v_y",
                 float(np.sqrt(max(energy_inner(n, diff, diff), 0.0))), 1e-9)


@dataclass(frozen=True)
class Sqrt2Report:
    max_ratio: float
    attained: float

    def checks(self) -> List[Check]:
        root2 = np.sqrt(2.0)
        return [
            Check("sqrt2_bound", "|<phi, v_x>_E| <= sqrt(2) ||phi||_l2", max(self.max_ratio - root2, 0.0), 1e-9),
            Check("sqrt2_attained", "delta_x - delta_o attains sqrt(2)", abs(self.attained - root2), 1e-9),
        ]


def sqrt2_bound_check(n: Network, x, trials: int = 1000, rng: Optional[np.random.Generator] = None) -> Sqrt2Report:
    """max over random finitely supported phi of |<phi, v_x>_E| / ||phi||_l2."""
    rng = rng if rng is not None else np.random.default_rng(config.DEFAULT_SEED)
    v = dipole(n, x)

    def ratio(phi):
        return abs(energy_inner(n, phi, v)) / np.linalg.norm(phi)

    worst = 0.0
    for _ in range(trials):
        phi = rng.standard_normal(len(n)) * (rng.random(len(n)) < 0.5)
        if not phi.any():
            continue
        worst = max(worst, ratio(phi))
    attained = ratio(n.delta(x) - n.delta(n.base))
    return Sqrt2Report(max(worst, attained), attained)


# ============ The K / L pair ============

@dataclass(frozen=True, eq=False)
class KLPair:
    pair: SymmetricPair
    dipoles: np.ndarray
    checks: List[Check]


def kl_pair(n: Network) -> KLPair:
    """
    K: l2(V) -> H_E, delta_x -> delta_x, and L: H_E -> l2(V), v_x -> delta_x - delta_o,
    in the delta and pinned-dipole coordinates.
    """
    es = energy_space(n)
    l2 = WeightedSpace.euclidean(len(n), "l2(V)")
    h_e = es.space
    k = pinning_map(n)
    a = OperatorBetween(k, l2, h_e)
    b = OperatorBetween(k.T @ h_e.gram, h_e, l2)
    pair = SymmetricPair(a, b)
    dipoles = dipole_matrix(n)
    # <K delta_x, v_y>_E = delta_xy - delta_xo
    table = (k.T @ h_e.gram @ dipoles)
    expected = np.array([[float(x == y) - float(x == n.base) for y in n.free_vertices] for x in n.vertices])
    images = b.matrix @ dipoles
    kl4 = images.T @ images
    checks = [
        pair.check(),
        Check("dipole_pairing_table", "<K delta_x, v_y>_E = delta_xy - delta_xo", residual_norm(table - expected),
              tolerance("identity")),
        Check("dipole_image_gram", "<L v_y, L v_x>_l2 = delta_xy + 1",
              residual_norm(kl4 - (np.eye(len(n) - 1) + 1.0)), tolerance("identity")),
    ]
    return KLPair(pair, dipoles, checks)


@dataclass(frozen=True, eq=False)
class ProductsReport:
    k_star_k: np.ndarray
    l_star_l: np.ndarray
    checks: List[Check]


def selfadjoint_products(n: Network, kl: Optional[KLPair] = None) -> ProductsReport:
    """K*K is the l2 graph Laplacian; L*L v_x = delta_x - delta_o and ker(L*L) = 0."""
    kl = kl if kl is not None else kl_pair(n)
    a, b = kl.pair.a, kl.pair.b
    k_star_k = (adjoint(a) @ a).matrix
    l_star_l = (adjoint(b) @ b).matrix
    h_e = b.domain
    k = pinning_map(n)
    # H_E coordinates of delta_x - delta_o, one column per free vertex
    target = np.column_stack([k @ (n.delta(x) - n.delta(n.base)) for x in n.free_vertices])
    st = l_star_l @ kl.dipoles - target
    smallest = sym_eigen(l_star_l, h_e.gram).values[0] if h_e.dim else 1.0
    checks = [
        Check("KstarK_laplacian", "K*K = graph Laplacian on l2",
              residual_norm(k_star_k - laplacian_matrix(n).toarray()), 1e-9),
        Check("LstarL_dipoles", "L*L v_x = delta_x - delta_o", residual_norm(st), 1e-9),
        Check("LstarL_trivial_kernel", "ker(L*L) = 0 in H_E", 0.0 if smallest > tolerance("rank") else 1.0, 0.5),
    ]
    return ProductsReport(k_star_k, l_star_l, checks)


def gl_pair(n: Network) -> SymmetricPair:
    """A: l2(V - o) -> H_E with delta_x -> delta_x, B = Delta back to l2(V - o)."""
    h_e = energy_space(n).space
    l2 = WeightedSpace.euclidean(h_e.dim, "l2(V-o)")
    a = OperatorBetween(np.eye(h_e.dim), l2, h_e)
    b = OperatorBetween(h_e.gram, h_e, l2)
    return SymmetricPair(a, b)


@dataclass(frozen=True)
class BigLReport:
    indices: Tuple[int, int]
    nearest_distance: float
    checks: List[Check]


def big_l_selfadjointness_probe(n: Network) -> BigLReport:
    """L = [[0, Delta], [A, 0]] is symmetric and A*B* has no eigenvalue -1: indices (0, 0)."""
    pair = gl_pair(n)
    l_op = build_l(pair)
    report = defect_space(pair)
    kl_report = defect_space(kl_pair(n).pair)
    d_plus, d_minus = deficiency_indices(pair)
    checks = [
        l_symmetry_check(l_op),
        Check("bigL_no_minus_one", "no eigenvalue of A*B* within tolerance of -1",
              float(report.dim + kl_report.dim), 0.5),
        Check("bigL_equal_indices", "d+ = d-", float(abs(d_plus - d_minus)), 0.5),
    ]
    return BigLReport(report.indices, min(report.nearest_distance, kl_report.nearest_distance), checks)


# ============ Duality on networks ============

@dataclass(frozen=True, eq=False)
class NetworkDuality:
    common_domain: CommonDomain
    delta: OperatorBetween
    checks: List[Check]


def network_common_domain(n: Network) -> CommonDomain:
    """D = span{delta_x} in H1 = l2(V) and H2 = H_E."""
    ambient = WeightedSpace.euclidean(len(n), "D")
    l2 = WeightedSpace.euclidean(len(n), "l2(V)")
    return CommonDomain(
        len(n),
        np.eye(len(n)),
        OperatorBetween(np.eye(len(n)), ambient, l2),
        OperatorBetween(pinning_map(n), ambient, energy_space(n).space),
    )


def network_duality(n: Network) -> NetworkDuality:
    """Delta of the pair (l2(V), H_E) is the graph Laplacian; spectral moments are c(x)."""
    cd = network_common_domain(n)
    delta = duality_operator(cd)
    checks = [Check("network_duality_laplacian", "Delta = graph Laplacian",
                    residual_norm(delta.matrix - laplacian_matrix(n).toarray()), 1e-9)]
    eig = sym_eigen(delta.matrix, delta.domain.gram)
    for x in n.vertices:
        phi = n.delta(x)
        measure = spectral_measure(delta, phi, eig)
        mass, moment = measure.moment_checks(1.0, energy_inner(n, phi, phi))
        checks.append(Check(f"network_mass[{x}]", mass.anchor, mass.residual, mass.tolerance))
        checks.append(Check(f"network_moment[{x}]", "first moment at delta_x = c(x)",
                            abs(measure.first_moment - n.conductance_at(x)) / max(n.conductance_at(x), 1.0), 1e-9))
    logger.debug(f"Network duality on '{n.name}': {len(checks)} checks")
    return NetworkDuality(cd, delta, checks)


def network_essential_selfadjointness(n: Network):
    """I + Delta on span{delta_x} has dense range in l2(V)."""
    l2 = WeightedSpace.euclidean(len(n), "l2(V)")
    shifted = OperatorBetween(np.eye(len(n)) + laplacian_matrix(n).toarray(), l2, l2)
    return essential_selfadjointness_probe(RestrictedOperator.full(shifted))


def finite_energy_closure_check(n: Network) -> List[Check]:
    """span{delta_x} is dense in H_E, i.e. no nonzero harmonic functions of finite energy."""
    h_e = energy_space(n).space
    rank = gram_rank(pinning_map(n), h_e.gram)
    return [Check("finite_energy_closure", "span{delta_x} dense in H_E", float(h_e.dim - rank), 0.5)]


@dataclass(frozen=True)
class NormComparability:
    max_conductance: float
    max_energy_ratio: float
    reverse_ratio: float
    argmax: str

    def check(self) -> Check:
        return Check("energy_ratio_conductance", "||delta_x||_E^2 = c(x)",
                     abs(self.max_energy_ratio - self.max_conductance) / max(self.max_conductance, 1.0), 1e-12)


def norm_comparability_probe(n: Network) -> NormComparability:
    """max_x ||delta_x||_E^2 / ||delta_x||_l2^2 and the reverse ratio on dipoles."""
    ratios = np.array([energy_inner(n, d, d) for d in np.eye(len(n))])
    arg = int(np.argmax(ratios))
    dipoles = dipole_matrix(n)
    # ||v_x||_E^2 = <v_x, delta_x - delta_o>_l2 = v_x(x)
    reverse = float(np.max(np.sum(dipoles ** 2, axis=0) / np.diag(dipoles))) if dipoles.size else 0.0
    return NormComparability(float(n.conductances().max()), float(ratios[arg]), reverse, n.vertices[arg])


def emit_network(n: Network) -> str:
    """Text form read back by formats.parse_network."""
    lines = [f"network {n.name}", f"base {n.base}"]
    lines.extend(f"edge {u} {v} {c!r}" for u, v, c in n.edges)
    # isolated single-vertex networks carry their vertex on a vertex line
    if not n.edges:
        lines.extend(f"vertex {v}" for v in n.vertices)
    return "\n".join(lines) + "\n"


def random_network(rng: np.random.Generator, size: int, extra_edges: int = 0,
                   conductance_range: Tuple[float, float] = (0.5, 3.0), name: str = "random") -> Network:
    """Random spanning tree on `size` vertices plus up to `extra_edges` chords, base "0"."""
    if size < 1:
        raise ValueError(f"size must be positive, got {size}")
    lo, hi = conductance_range
    pairs = {(int(rng.integers(0, k)), k) for k in range(1, size)}
    for _ in range(extra_edges if size > 2 else 0):
        u, v = sorted(int(i) for i in rng.choice(size, 2, replace=False))
        pairs.add((u, v))
    edges = tuple((str(u), str(v), float(rng.uniform(lo, hi))) for u, v in sorted(pairs))
    return Network(tuple(str(k) for k in range(size)), edges, "0", name=name)
