# -*- coding: utf-8 -*-
"""
@author:XuMing(xuming624@qq.com)
@description: Seeded verification suites.

Every suite returns a SuiteResult: report checks plus plain data rows for the CSV files.
Randomized checks over many instances are folded into one row per identity holding the
worst instance, so reports stay short and deterministic for a fixed seed.
"""
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from opduality import config
from opduality.base import Check, NotClosable, OpDualityError, random_gram, residual_norm
from opduality.charproj import (
    BlockProjection,
    adjoint_consistency,
    analyze_graph,
    char_projection,
    schur_complements,
    stone_identities,
)
from opduality.duality import (
    DiscreteMeasureSpace,
    SpectralMeasure,
    discrete_common_domain,
    dual_domain_is_full,
    duality_operator,
    kernel_complement_check,
    partial_isometry_checks,
    partial_isometry_k,
    radon_nikodym,
    schwarz_bounds,
    spectral_measure,
)
from opduality.exhaustion import (
    ExhaustionFamily,
    binary_tree_family,
    exhaustion_harmonics,
    path_family,
    spectral_growth,
)
from opduality.extensions import (
    RestrictedOperator,
    form_correspondence,
    friedrichs_extension,
    friedrichs_in_krein_set,
)
from opduality.hilbert_pair import CommonDomain, DirectSum, OperatorBetween, WeightedSpace, adjoint, graph_subspace
from opduality.linalg import sym_eigen
from opduality.log import log_checks, logger, suite_context
from opduality.network import (
    Network,
    big_l_selfadjointness_probe,
    delta_identity_check,
    dipole,
    dipole_reproducing_check,
    energy_inner,
    finite_energy_closure_check,
    kl_pair,
    laplacian_apply,
    network_duality,
    network_essential_selfadjointness,
    random_network,
    selfadjoint_products,
    sqrt2_bound_check,
)
from opduality.sympair import (
    SymmetricPair,
    boundary_form,
    deficiency_indices,
    deficiency_isomorphisms,
    interval_defect_model,
    interval_sweep,
    q_condition_check,
    random_gram_unitary,
)

Rows = List[dict]


@dataclass
class SuiteResult:
    name: str
    checks: List[Check] = field(default_factory=list)
    data: Dict[str, Rows] = field(default_factory=dict)

    def extend(self, other: "SuiteResult") -> "SuiteResult":
        self.checks.extend(other.checks)
        for key, rows in other.data.items():
            self.data.setdefault(key, []).extend(rows)
        return self


def worst_per_identity(checks: Sequence[Check]) -> List[Check]:
    """One check per identity name: the instance closest to (or furthest past) its tolerance."""
    grouped: Dict[str, List[Check]] = {}
    for c in checks:
        grouped.setdefault(c.name, []).append(c)

    def margin(c: Check) -> float:
        if not np.isfinite(c.residual):
            return np.inf
        if c.tolerance > 0:
            return c.residual / c.tolerance
        return np.inf if c.residual > 0 else 0.0

    out = []
    for name, group in grouped.items():
        worst = max(group, key=margin)
        label = f"{name}[n={len(group)}]" if len(group) > 1 else name
        out.append(Check(label, worst.anchor, worst.residual, worst.tolerance))
    return out


def _bool_check(name: str, anchor: str, ok: bool) -> Check:
    return Check(name, anchor, 0.0 if ok else 1.0, 0.5)


def _random_operator(rng: np.random.Generator, max_dim: int = 10) -> OperatorBetween:
    """Random T: H1 -> H2 with random Grams; dim H2 >= dim H1 keeps T injective."""
    n1 = int(rng.integers(1, max_dim + 1))
    n2 = int(rng.integers(n1, max_dim + 1))
    h1 = WeightedSpace(n1, random_gram(rng, n1), "H1")
    h2 = WeightedSpace(n2, random_gram(rng, n2), "H2")
    return OperatorBetween(rng.standard_normal((n2, n1)), h1, h2)


def _random_common_domain(rng: np.random.Generator, max_dim: int = 8) -> CommonDomain:
    n = int(rng.integers(1, max_dim + 1))
    return CommonDomain.same_coordinates(WeightedSpace(n, random_gram(rng, n), "H1"),
                                         WeightedSpace(n, random_gram(rng, n), "H2"))


def _rng(seed: Optional[int]) -> np.random.Generator:
    return np.random.default_rng(config.DEFAULT_SEED if seed is None else seed)


def projection_rows(e: BlockProjection, label: str = "T") -> Rows:
    rows = []
    for block in ("e11", "e12", "e21", "e22"):
        m = getattr(e, block)
        for (i, j), value in np.ndenumerate(m):
            rows.append({"operator": label, "block": block.upper(), "row": i, "col": j, "value": float(value)})
    return rows


def matrix_rows(m: np.ndarray, label: str) -> Rows:
    return [{"operator": label, "row": i, "col": j, "value": float(v)} for (i, j), v in np.ndenumerate(m)]


def measure_rows(measure: SpectralMeasure, phi: str) -> Rows:
    return [{"phi": phi, "lambda": lam, "mass": mass} for lam, mass in measure.atoms]


# ============ charproj ============

def check_operator(t: OperatorBetween, label: str = "T", strict_schur: bool = False) -> SuiteResult:
    """All characteristic projection identities for one operator."""
    e = char_projection(t)
    checks = e.residuals() + stone_identities(t, e)
    checks += schur_complements(e, strict=strict_schur).checks()
    checks += adjoint_consistency(t)
    analysis = analyze_graph(graph_subspace(t), DirectSum(t.domain, t.codomain))
    checks.append(_bool_check("graph_closable", "graph of T has no vertical part", analysis.closable))
    checks.append(Check("graph_recovers_T", "T_clo of the graph = T",
                        residual_norm(analysis.closable_part.matrix - t.matrix) / max(residual_norm(t.matrix), 1.0),
                        1e-9))
    return SuiteResult("charproj", checks, {"projection.csv": projection_rows(e, label)})


def charproj_suite(seed: Optional[int] = None, count: int = 200) -> SuiteResult:
    rng = _rng(seed)
    scalar = OperatorBetween(2.0, WeightedSpace.euclidean(1), WeightedSpace.euclidean(1))
    anchor = check_operator(scalar, "T=2")
    e = char_projection(scalar)
    anchor.checks.insert(0, Check("scalar_projection", "T = 2 gives E = [[1, 2], [2, 4]] / 5",
                                  residual_norm(e.matrix - np.array([[1.0, 2.0], [2.0, 4.0]]) / 5.0), 1e-14))
    instances = []
    for _ in range(count):
        instances.extend(check_operator(_random_operator(rng)).checks)
    logger.debug(f"charproj suite: {count} random operators")
    return SuiteResult("charproj", anchor.checks + worst_per_identity(instances), anchor.data)


# ============ duality ============

def check_common_domain(cd: CommonDomain, label: str = "D") -> SuiteResult:
    delta = duality_operator(cd)
    checks = [kernel_complement_check(cd)]
    checks += partial_isometry_checks(cd, partial_isometry_k(cd))
    g1, g2 = cd.first.gram, cd.second.gram
    atoms = []
    eig = sym_eigen(delta.matrix, g1)
    for j in range(cd.images1.shape[1]):
        phi1, phi2 = cd.images1[:, j], cd.images2[:, j]
        measure = spectral_measure(delta, phi1, eig)
        checks += measure.moment_checks(float(phi1 @ g1 @ phi1), float(phi2 @ g2 @ phi2))
        atoms += measure_rows(measure, f"{label}:{j}")
    checks.append(_bool_check("dual_domain_full", "D* = H2 in finite dimensions", dual_domain_is_full(cd)))
    return SuiteResult("duality", checks, {"duality_operator.csv": matrix_rows(delta.matrix, label),
                                           "spectral_measures.csv": atoms})


def _discrete_pair(rng: np.random.Generator, size: int = 6):
    points = tuple(f"p{k}" for k in range(size))
    w1 = rng.uniform(0.5, 2.0, size) * (rng.random(size) > 0.3)
    w2 = rng.uniform(0.5, 2.0, size) * (rng.random(size) > 0.3)
    w1[0] = max(w1[0], 0.5)
    return DiscreteMeasureSpace(points, w1, "L2(mu1)"), DiscreteMeasureSpace(points, w2, "L2(mu2)")


def check_discrete_pair(mu1: DiscreteMeasureSpace, mu2: DiscreteMeasureSpace,
                        rng: Optional[np.random.Generator] = None) -> List[Check]:
    """Dense dual domain iff supp mu2 lies in supp mu1; then Delta = dmu2/dmu1."""
    contained = set(mu2.support) <= set(mu1.support)
    cd = discrete_common_domain(mu1, mu2)
    try:
        delta = duality_operator(cd)
    except NotClosable:
        dense = dual_domain_is_full(cd)
        return [_bool_check("discrete_dichotomy", "D* dense iff supp mu2 in supp mu1", not contained and not dense)]
    checks = [
        _bool_check("discrete_dichotomy", "D* dense iff supp mu2 in supp mu1", contained and dual_domain_is_full(cd)),
        Check("discrete_radon_nikodym", "Delta = diag(dmu2/dmu1)",
              residual_norm(delta.matrix - np.diag(radon_nikodym(mu1, mu2))), 1e-12),
    ]
    if rng is not None:
        n = cd.first.dim
        u = OperatorBetween(np.diag(rng.choice([-1.0, 1.0], n)), cd.first, cd.first)
        # phi in D supported on supp mu1, in ambient coordinates
        coefficients = mu1.restriction().T @ rng.standard_normal(n)
        checks.append(schwarz_bounds(cd, u, coefficients).check())
    return checks


def duality_suite(seed: Optional[int] = None, count: int = 200, discrete: int = 50) -> SuiteResult:
    rng = _rng(seed)
    p2 = Network(("0", "1"), (("0", "1", 1.0),), "0", name="p2")
    nd = network_duality(p2)
    measure = spectral_measure(nd.delta, p2.delta("0"))
    expected = np.array([[0.0, 0.5], [2.0, 0.5]])
    got = np.array(measure.atoms) if measure.atoms else np.zeros((0, 2))
    anchors = [
        Check("p2_laplacian", "P2 gives Delta = [[1, -1], [-1, 1]]",
              residual_norm(nd.delta.matrix - np.array([[1.0, -1.0], [-1.0, 1.0]])), 1e-12),
        Check("p2_spectral_atoms", "mu at delta_0 = {(0, 1/2), (2, 1/2)}",
              residual_norm(got - expected) if got.shape == expected.shape else np.inf, 1e-12),
    ]
    result = SuiteResult("duality", anchors, {"spectral_measures.csv": measure_rows(measure, "p2:delta_0")})
    instances = []
    for k in range(count):
        instance = check_common_domain(_random_common_domain(rng), f"random{k}")
        instances.extend(instance.checks)
    discrete_checks = []
    for _ in range(discrete):
        mu1, mu2 = _discrete_pair(rng)
        discrete_checks.extend(check_discrete_pair(mu1, mu2, rng))
    result.checks += worst_per_identity(instances) + worst_per_identity(discrete_checks)
    return result


# ============ Friedrichs and Krein ============

def _random_semibounded(rng: np.random.Generator, max_dim: int = 8) -> RestrictedOperator:
    """A = I + G^-1 C^T C, selfadjoint in G and >= 1, on all of H or on a random subspace."""
    n = int(rng.integers(2, max_dim + 1))
    g = random_gram(rng, n)
    c = rng.standard_normal((n, n))
    space = WeightedSpace(n, g, "H")
    a = OperatorBetween(np.eye(n) + np.linalg.solve(g, c.T @ c), space, space)
    if rng.random() < 0.5:
        return RestrictedOperator.full(a)
    k = int(rng.integers(1, n))
    return RestrictedOperator.on_subspace(a, rng.standard_normal((n, k)))


def friedrichs_suite(seed: Optional[int] = None, count: int = 50) -> SuiteResult:
    rng = _rng(seed)
    checks = []
    for _ in range(count):
        a = _random_semibounded(rng)
        checks += friedrichs_extension(a).checks
        checks += friedrichs_in_krein_set(a).checks
        if a.is_full:
            checks += form_correspondence(OperatorBetween(a.images, a.space, a.space)).checks
    return SuiteResult("friedrichs", worst_per_identity(checks))


# ============ networks ============

def check_network(n: Network, rng: np.random.Generator, sqrt2_trials: int = 100) -> SuiteResult:
    """Dipoles, the K/L pair, the products and the selfadjointness probes on one network."""
    checks: List[Check] = []
    rows: Rows = []
    for x in n.free_vertices:
        v = dipole(n, x)
        rows += [{"dipole": x, "vertex": y, "value": float(val)} for y, val in zip(n.vertices, v)]
        checks.append(dipole_reproducing_check(n, x, rng))
    checks += [delta_identity_check(n, x) for x in n.vertices]
    u, w = rng.standard_normal(len(n)), rng.standard_normal(len(n))
    lhs, rhs = energy_inner(n, u, w), float(u @ laplacian_apply(n, w))
    checks.append(Check("summation_by_parts", "<u, v>_E = <u, Delta v>_l2", abs(lhs - rhs) / max(abs(rhs), 1.0),
                        1e-12))
    kl = kl_pair(n)
    checks += kl.checks
    checks += selfadjoint_products(n, kl).checks
    checks += big_l_selfadjointness_probe(n).checks
    checks += network_duality(n).checks
    checks += finite_energy_closure_check(n)
    density = network_essential_selfadjointness(n)
    checks.append(_bool_check("network_essential_selfadjoint", "(I + Delta) span{delta_x} dense in l2",
                              density.dense))
    if n.free_vertices:
        checks += sqrt2_bound_check(n, n.free_vertices[0], sqrt2_trials, rng).checks()
    return SuiteResult("network", checks, {"dipoles.csv": rows})


def p3_anchors(n: Network, rng: np.random.Generator) -> SuiteResult:
    """Hand-computed values on the path 0 - 1 - 2 with unit conductances."""
    result = check_network(n, rng, sqrt2_trials=1000)
    kl = kl_pair(n)
    images = kl.pair.b.matrix @ kl.dipoles
    anchors = [
        Check("p3_dipole_v1", "v_1 = (0, 1, 1)", residual_norm(dipole(n, "1") - [0.0, 1.0, 1.0]), 1e-12),
        Check("p3_dipole_v2", "v_2 = (0, 1, 2)", residual_norm(dipole(n, "2") - [0.0, 1.0, 2.0]), 1e-12),
        Check("p3_dipole_image_gram", "<L v_y, L v_x> = [[2, 1], [1, 2]]",
              residual_norm(images.T @ images - np.array([[2.0, 1.0], [1.0, 2.0]])), 1e-10),
        Check("p3_energy", "||(0, 1, 1)||_E^2 = 1", abs(energy_inner(n, [0, 1, 1], [0, 1, 1]) - 1.0), 1e-12),
        Check("p3_laplacian", "Delta (0, 1, 1) = delta_1 - delta_0",
              residual_norm(laplacian_apply(n, [0, 1, 1]) - [-1.0, 1.0, 0.0]), 1e-12),
    ]
    result.checks = anchors + result.checks
    for x in n.free_vertices[1:]:
        result.checks += [Check(f"{c.name}[{x}]", c.anchor, c.residual, c.tolerance)
                          for c in sqrt2_bound_check(n, x, 1000, rng).checks()]
    return result


def network_suite(p3: Network, seed: Optional[int] = None, count: int = 100) -> SuiteResult:
    rng = _rng(seed)
    result = p3_anchors(p3, rng)
    instances = []
    for k in range(count):
        size = int(rng.integers(3, 31))
        n = random_network(rng, size, extra_edges=int(rng.integers(0, size)), name=f"random{k}")
        instances.extend(check_network(n, rng, sqrt2_trials=20).checks)
    # vertex-indexed names differ per network, fold them by their identity prefix
    folded = [Check(c.name.split("[")[0], c.anchor, c.residual, c.tolerance) for c in instances]
    result.checks += worst_per_identity(folded)
    return result


# ============ defect spaces ============

def interval_suite(interval=(0.0, 1.0), grid: int = 256, sweep: Sequence[float] = tuple(range(1, 9)),
                   seed: Optional[int] = None) -> SuiteResult:
    rng = _rng(seed)
    model = interval_defect_model(grid, interval)
    checks = list(model.checks)
    checks.append(Check("interval_indices", "(d+, d-) = (2, 2)", float(abs(model.indices[0] - 2)), 0.5))
    if tuple(map(float, interval)) == (0.0, 1.0):
        e = np.e
        expected = np.array([[(e ** 2 - 1) / 2, 1.0], [1.0, (1 - e ** -2) / 2]])
        checks.append(Check("interval_gram", "Gram of e^x, e^-x on (0, 1)",
                            float(np.abs(model.gram - expected).max()), 1e-6))
    checks += list(deficiency_isomorphisms(model).checks)
    q = random_gram_unitary(rng, model.gram)
    checks.append(q_condition_check(model, q))
    u = rng.standard_normal(model.dim)
    scale = float(u @ model.gram @ (u + model.bb_star_action @ u))
    checks.append(Check("boundary_form_vanishes", "Im <f, L* f> = 0 for v = Q u",
                        abs(boundary_form(model, u, q @ u)) / max(scale, 1.0), 1e-9))
    report = interval_sweep(sweep, grid)
    far = [row for row in report.rows if row["radius"] >= 6]
    checks.append(_bool_check("interval_sweep_infinity", "indices (0, 0) on the real line for R >= 6",
                              bool(far) and all(row["dim_at_infinity"] == 0 for row in far)))
    # finite pairs have B = A*, so no defect space
    t = _random_operator(rng, 6)
    pair = SymmetricPair(t, adjoint(t))
    checks.append(_bool_check("finite_pair_indices", "finite pairs have indices (0, 0)",
                              deficiency_indices(pair) == (0, 0)))
    return SuiteResult("defect", checks, {"interval_sweep.csv": list(report.rows)})


# ============ exhaustions ============

def exhaustion_rows(report) -> Rows:
    return [{"family": report.generator, "level": r.level, "r_free": r.r_free, "r_wired": r.r_wired, "gap": r.gap}
            for r in report.rows]


def check_family(fam: ExhaustionFamily, x: Optional[str] = None, y: Optional[str] = None) -> SuiteResult:
    report = exhaustion_harmonics(fam, x, y)
    _, growth = spectral_growth(fam)
    return SuiteResult("exhaust", report.checks + growth, {"exhaustion.csv": exhaustion_rows(report)})


def exhaustion_suite() -> SuiteResult:
    path = exhaustion_harmonics(path_family((8, 16, 32)))
    tree = exhaustion_harmonics(binary_tree_family(tuple(range(4, 11)), 1.0))
    rows, growth = spectral_growth(binary_tree_family(tuple(range(2, 7)), 2.0))
    top = np.array([r.max_conductance for r in rows])
    checks = path.checks + tree.checks + growth + [
        Check("path_gap_vanishes", "free and wired agree on the half-line",
              float(np.abs(path.gaps).max()), 1e-9),
        _bool_check("tree_gap_positive", "binary tree keeps a positive free-wired gap", bool(np.all(tree.gaps > 0))),
        _bool_check("tree_gap_monotone", "binary tree gaps decrease with depth", tree.monotone),
        Check("tree_conductance_doubling", "max c(x) doubles per level at ratio 2",
              float(np.abs(top[1:] / top[:-1] - 2.0).max()), 1e-12),
    ]
    return SuiteResult("exhaust", checks, {"exhaustion.csv": exhaustion_rows(path) + exhaustion_rows(tree)})


# ============ all ============

def verify_all(p3: Network, seed: Optional[int] = None) -> List[SuiteResult]:
    """Every suite at its acceptance size, each seeded from `seed` on its own."""
    runners: List[Tuple[str, Callable[[], SuiteResult]]] = [
        ("charproj", lambda: charproj_suite(seed)),
        ("duality", lambda: duality_suite(seed)),
        ("friedrichs", lambda: friedrichs_suite(seed)),
        ("network", lambda: network_suite(p3, seed)),
        ("defect", lambda: interval_suite(seed=seed)),
        ("exhaust", exhaustion_suite),
    ]
    results = []
    for name, run in runners:
        with suite_context(name, seed):
            try:
                results.append(run())
            except OpDualityError as e:
                logger.error(f"Suite aborted with {type(e).__name__}: {e}")
                raise
            failures = log_checks(results[-1].checks)
            logger.info(f"{len(results[-1].checks) - failures}/{len(results[-1].checks)} checks pass")
    return results
