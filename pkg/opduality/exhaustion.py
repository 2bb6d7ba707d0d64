# -*- coding: utf-8 -*-
"""
@author:XuMing(xuming624@qq.com)
@description: Exhaustions of infinite networks by nested finite levels.

Each level is solved twice: free (edges leaving the level deleted) and wired (the level
boundary merged into one vertex). R_free - R_wired stays positive on transient networks and
vanishes on recurrent ones.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse.linalg

from opduality import config
from opduality.base import Check, VertexMissing
from opduality.config import tolerance
from opduality.log import logger
from opduality.network import Network, effective_resistance, laplacian_matrix, norm_comparability_probe

WIRED_LABEL = "wired"


@dataclass(frozen=True, eq=False)
class ExhaustionFamily:
    """Nested networks with the boundary of each level; `params` are the generating sizes."""
    generator: str
    levels: Tuple[Network, ...]
    boundaries: Tuple[FrozenSet[str], ...]
    params: Tuple[int, ...]
    default_pair: Tuple[str, str] = ("0", "1")
    boundary_modes: Tuple[str, ...] = ("free", "wired")

    def __post_init__(self):
        if not self.levels:
            raise ValueError("Exhaustion family needs at least one level")
        if not (len(self.levels) == len(self.boundaries) == len(self.params)):
            raise ValueError("levels, boundaries and params must have the same length")
        for smaller, larger in zip(self.levels, self.levels[1:]):
            if not set(smaller.vertices) <= set(larger.vertices):
                raise ValueError(f"Levels of '{self.generator}' are not nested")
        for mode in self.boundary_modes:
            if mode not in ("free", "wired"):
                raise ValueError(f"Unknown boundary mode '{mode}'")

    def __len__(self) -> int:
        return len(self.levels)


def wired(n: Network, boundary: FrozenSet[str]) -> Network:
    """Merge the boundary vertices into one; parallel edges add, edges inside the boundary vanish."""
    if not boundary:
        return n

    def merge(v: str) -> str:
        return WIRED_LABEL if v in boundary else v

    combined: Dict[Tuple[str, str], float] = {}
    for u, v, c in n.edges:
        a, b = merge(u), merge(v)
        if a == b:
            continue
        key = (a, b) if (b, a) not in combined else (b, a)
        combined[key] = combined.get(key, 0.0) + c
    vertices = tuple(v for v in n.vertices if v not in boundary) + (WIRED_LABEL,)
    return Network(vertices, tuple((u, v, c) for (u, v), c in combined.items()), merge(n.base),
                   name=f"{n.name}-wired")


# ============ Generators ============

def path_network(n: int) -> Tuple[Network, FrozenSet[str]]:
    """Half-line 0 - 1 - ... - n with unit conductances; boundary {n}."""
    vertices = tuple(str(k) for k in range(n + 1))
    edges = tuple((str(k), str(k + 1), 1.0) for k in range(n))
    return Network(vertices, edges, "0", name=f"path_{n}"), frozenset({str(n)})


def _site(i: int, j: int) -> str:
    return f"{i},{j}"


def lattice_network(n: int) -> Tuple[Network, FrozenSet[str]]:
    """Box [-n, n]^2 of Z^2 with unit conductances; boundary is the outer ring."""
    coords = range(-n, n + 1)
    vertices = tuple(_site(i, j) for i in coords for j in coords)
    edges = []
    for i in coords:
        for j in coords:
            if i < n:
                edges.append((_site(i, j), _site(i + 1, j), 1.0))
            if j < n:
                edges.append((_site(i, j), _site(i, j + 1), 1.0))
    boundary = frozenset(_site(i, j) for i in coords for j in coords if max(abs(i), abs(j)) == n)
    return Network(vertices, tuple(edges), _site(0, 0), name=f"lattice2d_{n}"), boundary


def binary_tree_network(depth: int, ratio: float = 1.0) -> Tuple[Network, FrozenSet[str]]:
    """
    Rooted binary tree in heap order ("0" is the root); an edge from level k-1 to level k has
    conductance ratio^(k-1). Boundary is the deepest level.
    """
    size = 2 ** (depth + 1) - 1
    vertices = tuple(str(k) for k in range(size))
    edges = []
    for child in range(1, size):
        parent = (child - 1) // 2
        level = int(np.floor(np.log2(child + 1)))
        edges.append((str(parent), str(child), float(ratio) ** (level - 1)))
    boundary = frozenset(str(k) for k in range(2 ** depth - 1, size))
    return Network(vertices, tuple(edges), "0", name=f"binary_tree_{depth}"), boundary


def path_family(levels: Sequence[int] = (8, 16, 32)) -> ExhaustionFamily:
    built = [path_network(n) for n in levels]
    return ExhaustionFamily("path_n", tuple(b[0] for b in built), tuple(b[1] for b in built), tuple(levels),
                            default_pair=("0", "1"))


def lattice_family(levels: Sequence[int] = (2, 4, 8)) -> ExhaustionFamily:
    built = [lattice_network(n) for n in levels]
    return ExhaustionFamily("lattice2d_n", tuple(b[0] for b in built), tuple(b[1] for b in built), tuple(levels),
                            default_pair=(_site(0, 0), _site(1, 0)))


def binary_tree_family(depths: Sequence[int] = tuple(range(4, 11)), ratio: float = 1.0) -> ExhaustionFamily:
    built = [binary_tree_network(d, ratio) for d in depths]
    return ExhaustionFamily(f"binary_tree:{ratio:g}", tuple(b[0] for b in built), tuple(b[1] for b in built),
                            tuple(depths), default_pair=("0", "1"))


def make_family(name: str, levels: Optional[Sequence[int]] = None) -> ExhaustionFamily:
    """
    Build a family from its command-line name: path_n, lattice2d_n or binary_tree:<depth>:<ratio>.
    For binary trees the depth is the largest level when `levels` is not given.
    """
    if name == "path_n":
        return path_family(levels or (8, 16, 32))
    if name == "lattice2d_n":
        return lattice_family(levels or (2, 4, 8))
    if name.startswith("binary_tree"):
        parts = name.split(":")
        try:
            depth = int(parts[1]) if len(parts) > 1 and parts[1] else 10
            ratio = float(parts[2]) if len(parts) > 2 and parts[2] else 1.0
        except ValueError:
            raise ValueError(f"Malformed family '{name}', expected binary_tree:<depth>:<ratio>") from None
        return binary_tree_family(levels or tuple(range(min(4, depth), depth + 1)), ratio)
    raise ValueError(f"Unknown family '{name}'")


# ============ Diagnostics ============

@dataclass(frozen=True)
class ExhaustionRow:
    level: int
    r_free: float
    r_wired: float

    @property
    def gap(self) -> float:
        return self.r_free - self.r_wired


@dataclass(frozen=True)
class ExhaustionReport:
    generator: str
    rows: Tuple[ExhaustionRow, ...]
    checks: List[Check] = field(default_factory=list)

    @property
    def gaps(self) -> np.ndarray:
        return np.array([r.gap for r in self.rows])

    @property
    def vanishing(self) -> bool:
        """Every gap below 1e-9: no harmonic functions of finite energy seen."""
        return bool(np.all(np.abs(self.gaps) <= 1e-9))

    @property
    def monotone(self) -> bool:
        """Gaps non-increasing level to level (single-level families make no claim)."""
        gaps = self.gaps
        return bool(len(gaps) < 2 or np.all(np.diff(gaps) <= 1e-12))


def _resolve(label: str, n: Network, boundary: FrozenSet[str], wired_mode: bool) -> str:
    if label not in n.vertices:
        raise VertexMissing(f"Vertex '{label}' not in level '{n.name}'")
    return WIRED_LABEL if wired_mode and label in boundary else label


def _level_resistances(args) -> ExhaustionRow:
    param, n, boundary, x, y = args
    r_free = effective_resistance(n, x, y)
    w = wired(n, boundary)
    r_wired = effective_resistance(w, _resolve(x, n, boundary, True), _resolve(y, n, boundary, True))
    logger.debug(f"Level {param} ({len(n)} vertices): R_free={r_free:.6e}, R_wired={r_wired:.6e}")
    return ExhaustionRow(param, r_free, r_wired)


def exhaustion_harmonics(fam: ExhaustionFamily, x: Optional[str] = None, y: Optional[str] = None,
                         workers: Optional[int] = None) -> ExhaustionReport:
    """
    R_free and R_wired between x and y at every level, levels solved concurrently.

    Raises:
        VertexMissing: x or y absent from some level
    """
    x = str(x) if x is not None else fam.default_pair[0]
    y = str(y) if y is not None else fam.default_pair[1]
    for n in fam.levels:
        _resolve(x, n, frozenset(), False)
        _resolve(y, n, frozenset(), False)
    jobs = [(p, n, b, x, y) for p, n, b in zip(fam.params, fam.levels, fam.boundaries)]
    with ThreadPoolExecutor(max_workers=workers or config.MAX_WORKERS) as executor:
        rows = tuple(executor.map(_level_resistances, jobs))
    checks = []
    for row, n in zip(rows, fam.levels):
        # iterative solves carry the CG tolerance into the comparison
        slack = 1e-12 if len(n) <= config.DENSE_SOLVE_MAX_DIM else 1e-12 + 10 * tolerance("cg") * row.r_free
        checks.append(Check(f"rayleigh_monotone[{fam.generator}:{row.level}]", "R_wired <= R_free",
                            max(row.r_wired - row.r_free, 0.0), slack))
    logger.info(f"Exhaustion {fam.generator}: gaps {[f'{r.gap:.3e}' for r in rows]}")
    return ExhaustionReport(fam.generator, rows, checks)


def _largest_eigenvalue(n: Network) -> float:
    lap = laplacian_matrix(n)
    if len(n) <= config.DENSE_SOLVE_MAX_DIM:
        return float(np.linalg.eigvalsh(lap.toarray())[-1])
    return float(scipy.sparse.linalg.eigsh(lap, k=1, which="LA", return_eigenvectors=False)[0])


@dataclass(frozen=True)
class GrowthRow:
    level: int
    max_conductance: float
    largest_eigenvalue: float


def spectral_growth(fam: ExhaustionFamily) -> Tuple[List[GrowthRow], List[Check]]:
    """lambda_max of the l2 Laplacian per level, bracketed by max c(x) <= lambda_max <= 2 max c(x)."""
    rows, checks = [], []
    for param, n in zip(fam.params, fam.levels):
        top = float(n.conductances().max()) if n.edges else 0.0
        lam = _largest_eigenvalue(n) if n.edges else 0.0
        rows.append(GrowthRow(param, top, lam))
        slack = 1e-9 * max(top, 1.0)
        checks.append(Check(f"spectral_bracket[{fam.generator}:{param}]", "max c <= lambda_max <= 2 max c",
                            max(top - lam, lam - 2.0 * top, 0.0), slack))
    return rows, checks


@dataclass(frozen=True)
class ComparabilityRow:
    level: int
    max_conductance: float
    reverse_ratio: float


def norm_comparability_trend(fam: ExhaustionFamily) -> List[ComparabilityRow]:
    """max c(x) and the dipole reverse ratio across levels; unbounded c shows up as growth."""
    out = []
    for param, n in zip(fam.params, fam.levels):
        probe = norm_comparability_probe(n)
        out.append(ComparabilityRow(param, probe.max_conductance, probe.reverse_ratio))
    return out
