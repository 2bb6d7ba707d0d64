# -*- coding: utf-8 -*-
"""
@author:XuMing(xuming624@qq.com)
@description: Finite-dimensional Hilbert spaces with distinct inner products.

Weighted spaces, operators between them with Gram-aware adjoints, direct sums and
graphs, the flip V, common domains of two spaces and the dual domain, operator norms
and polar decompositions.
"""
from dataclasses import dataclass, field
from typing import List

import numpy as np
import scipy.linalg

from opduality.base import Check, as_matrix
from opduality.config import tolerance
from opduality.linalg import (
    cholesky_spd,
    gram_orthonormalize,
    gram_rank,
    orthogonal_complement,
    solve_dense_spd,
    sym_eigen,
)


@dataclass(frozen=True, eq=False)
class WeightedSpace:
    """R^dim with the inner product <u, v> = u^T gram v."""
    dim: int
    gram: np.ndarray
    label: str = "H"

    def __post_init__(self):
        gram = as_matrix(self.gram, "gram") if self.dim else np.zeros((0, 0))
        if gram.shape != (self.dim, self.dim):
            raise ValueError(f"Gram of {self.label} has shape {gram.shape}, expected ({self.dim}, {self.dim})")
        cholesky_spd(gram)
        object.__setattr__(self, "gram", gram)

    @classmethod
    def euclidean(cls, dim: int, label: str = "R") -> "WeightedSpace":
        return cls(dim, np.eye(dim), label)

    def inner(self, u, v) -> float:
        return float(np.asarray(u, dtype=float) @ self.gram @ np.asarray(v, dtype=float))

    def norm(self, u) -> float:
        return float(np.sqrt(max(self.inner(u, u), 0.0)))

    def identity(self) -> "OperatorBetween":
        return OperatorBetween(np.eye(self.dim), self, self)

    def __repr__(self):
        return f"WeightedSpace({self.label}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class OperatorBetween:
    """A matrix acting from `domain` coordinates to `codomain` coordinates."""
    matrix: np.ndarray
    domain: WeightedSpace
    codomain: WeightedSpace

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        shape = (self.codomain.dim, self.domain.dim)
        if m.size != shape[0] * shape[1] or (m.ndim == 2 and m.shape != shape):
            raise ValueError(
                f"Operator matrix shape {m.shape} does not match {self.codomain.label} x {self.domain.label} {shape}"
            )
        m = m.reshape(shape)
        if not np.all(np.isfinite(m)):
            raise ValueError("Operator matrix has non-finite entries")
        object.__setattr__(self, "matrix", m)

    def apply(self, x) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=float)

    def __matmul__(self, other: "OperatorBetween") -> "OperatorBetween":
        if other.codomain.dim != self.domain.dim:
            raise ValueError(f"Cannot compose {self.domain.label} <- {other.codomain.label}")
        return OperatorBetween(self.matrix @ other.matrix, other.domain, self.codomain)

    def __repr__(self):
        return f"OperatorBetween({self.domain.label} -> {self.codomain.label}, shape={self.matrix.shape})"


@dataclass(frozen=True, eq=False)
class DirectSum:
    first: WeightedSpace
    second: WeightedSpace
    space: WeightedSpace = field(init=False, repr=False)

    def __post_init__(self):
        gram = scipy.linalg.block_diag(self.first.gram, self.second.gram)
        label = f"{self.first.label}+{self.second.label}"
        object.__setattr__(self, "space", WeightedSpace(self.first.dim + self.second.dim, gram, label))

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def gram(self) -> np.ndarray:
        return self.space.gram

    def swapped(self) -> "DirectSum":
        return DirectSum(self.second, self.first)

    def split(self, vec):
        vec = np.asarray(vec, dtype=float)
        return vec[: self.first.dim], vec[self.first.dim:]

    def join(self, x, y) -> np.ndarray:
        return np.concatenate([np.asarray(x, dtype=float).reshape(-1), np.asarray(y, dtype=float).reshape(-1)])


def adjoint(t: OperatorBetween) -> OperatorBetween:
    """T* = G1^-1 T^T G2, so that <T u, v>_2 = <u, T* v>_1."""
    if t.domain.dim == 0 or t.codomain.dim == 0:
        return OperatorBetween(np.zeros((t.domain.dim, t.codomain.dim)), t.codomain, t.domain)
    matrix = solve_dense_spd(t.domain.gram, t.matrix.T @ t.codomain.gram)
    return OperatorBetween(matrix, t.codomain, t.domain)


def graph_subspace(t: OperatorBetween) -> np.ndarray:
    """Columns [phi; T phi] over the standard basis of the domain."""
    return np.vstack([np.eye(t.domain.dim), t.matrix])


def v_flip(ds: DirectSum) -> OperatorBetween:
    """V[phi; psi] = [-psi; phi], from ds to ds.swapped()."""
    n1, n2 = ds.first.dim, ds.second.dim
    matrix = np.block([
        [np.zeros((n2, n1)), -np.eye(n2)],
        [np.eye(n1), np.zeros((n1, n2))],
    ])
    return OperatorBetween(matrix, ds.space, ds.swapped().space)


def adjoint_graph_check(t: OperatorBetween) -> List[Check]:
    """
    Verify that the graph of T* is the orthogonal complement of V applied to the graph of T,
    inside the swapped direct sum. One check per basis vector of the adjoint graph plus
    a dimension count.
    """
    ds = DirectSum(t.domain, t.codomain)
    swapped = ds.swapped()
    g_adj = graph_subspace(adjoint(t))
    v_graph = v_flip(ds).matrix @ graph_subspace(t)
    checks = []
    tol = tolerance("identity")
    v_norms = np.sqrt(np.diag(v_graph.T @ swapped.gram @ v_graph))
    for j in range(g_adj.shape[1]):
        g = g_adj[:, j]
        cross = (v_graph.T @ swapped.gram @ g) / (v_norms * swapped.space.norm(g))
        residual = float(np.abs(cross).max(initial=0.0))
        checks.append(Check(f"adjoint_graph_orthogonal[{j}]", "graph of T* is orthogonal to V(graph T)", residual, tol))
    dims = gram_rank(g_adj, swapped.gram) + gram_rank(v_graph, swapped.gram)
    checks.append(Check("adjoint_graph_dimension", "graph of T* and V(graph T) fill the sum",
                        float(abs(dims - swapped.dim)), 0.5))
    return checks


def operator_norm(t: OperatorBetween) -> float:
    """Largest generalized singular value, sqrt of the top eigenvalue of T*T."""
    if t.domain.dim == 0 or t.codomain.dim == 0:
        return 0.0
    gram_t = adjoint(t) @ t
    values = sym_eigen(gram_t.matrix, t.domain.gram).values
    return float(np.sqrt(max(values[-1], 0.0)))


@dataclass(frozen=True, eq=False)
class PolarDecomposition:
    partial_isometry: OperatorBetween
    modulus: OperatorBetween

    def residuals(self, t: OperatorBetween) -> List[Check]:
        w, mod = self.partial_isometry, self.modulus
        tol = tolerance("identity") * max(np.linalg.norm(t.matrix), 1.0) * 10
        w_star_w = (adjoint(w) @ w).matrix
        left = _sqrt_operator(t @ adjoint(t))
        return [
            Check("polar_factorization", "T = W|T|", float(np.linalg.norm(w.matrix @ mod.matrix - t.matrix)), tol),
            Check("polar_partial_isometry", "W*W is a projection",
                  float(np.linalg.norm(w_star_w @ w_star_w - w_star_w)), tol),
            Check("polar_left_form", "T = (TT*)^{1/2} W", float(np.linalg.norm(left @ w.matrix - t.matrix)), tol),
        ]


def _sqrt_operator(p: OperatorBetween) -> np.ndarray:
    eig = sym_eigen(p.matrix, p.domain.gram)
    return eig.apply(lambda lam: np.sqrt(np.clip(lam, 0.0, None)))


def polar_decomposition(t: OperatorBetween) -> PolarDecomposition:
    """
    T = W |T| with |T| = (T*T)^{1/2} on the domain and W a partial isometry
    that is zero on ker |T|.
    """
    eig = sym_eigen((adjoint(t) @ t).matrix, t.domain.gram)
    lam = np.clip(eig.values, 0.0, None)
    mask = eig.kernel_mask()
    root = np.sqrt(lam)
    inv_root = np.zeros_like(root)
    inv_root[~mask] = 1.0 / root[~mask]
    modulus = OperatorBetween(eig.apply(lambda _: root), t.domain, t.domain)
    w = OperatorBetween(t.matrix @ eig.apply(lambda _: inv_root), t.domain, t.codomain)
    return PolarDecomposition(w, modulus)


def orthogonal_projection(columns, space: WeightedSpace) -> np.ndarray:
    """Gram-orthogonal projection onto span(columns): Q Q^T G."""
    q = gram_orthonormalize(columns, space.gram)
    return q @ q.T @ space.gram


def complement_projection(u: OperatorBetween, p) -> np.ndarray:
    """Projection onto the complement of U(ran P): I - U P U*, for U unitary."""
    p = as_matrix(p, "p")
    return np.eye(u.codomain.dim) - u.matrix @ p @ adjoint(u).matrix


# ============ Common domains ============

@dataclass(frozen=True, eq=False)
class CommonDomain:
    """
    A subspace D of an ambient coordinate space R^ambient_dim, spanned by `basis` columns,
    mapped into H1 and H2 by the coordinate maps embed1 and embed2.
    """
    ambient_dim: int
    basis: np.ndarray
    embed1: OperatorBetween
    embed2: OperatorBetween

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=float)
        basis = as_matrix(basis, "basis") if basis.size else np.zeros((self.ambient_dim, 0))
        if basis.shape[0] != self.ambient_dim:
            raise ValueError(f"Basis has {basis.shape[0]} rows, ambient dim is {self.ambient_dim}")
        for e in (self.embed1, self.embed2):
            if e.domain.dim != self.ambient_dim:
                raise ValueError(f"Embedding {e} does not start from the ambient space")
        object.__setattr__(self, "basis", basis)

    @classmethod
    def same_coordinates(cls, first: WeightedSpace, second: WeightedSpace, basis=None) -> "CommonDomain":
        """Both spaces on the same coordinates; D = span(basis), all of R^dim by default."""
        if first.dim != second.dim:
            raise ValueError(f"Spaces differ in dimension: {first.dim} vs {second.dim}")
        ambient = WeightedSpace.euclidean(first.dim, "D")
        basis = np.eye(first.dim) if basis is None else as_matrix(basis, "basis")
        return cls(
            first.dim,
            basis,
            OperatorBetween(np.eye(first.dim), ambient, first),
            OperatorBetween(np.eye(first.dim), ambient, second),
        )

    @property
    def first(self) -> WeightedSpace:
        return self.embed1.codomain

    @property
    def second(self) -> WeightedSpace:
        return self.embed2.codomain

    @property
    def images1(self) -> np.ndarray:
        return self.embed1.matrix @ self.basis

    @property
    def images2(self) -> np.ndarray:
        return self.embed2.matrix @ self.basis

    @property
    def dense_in_first(self) -> bool:
        return gram_rank(self.images1, self.first.gram) == self.first.dim

    def null_directions(self) -> np.ndarray:
        """Coefficient vectors c with images1 @ c = 0 (zero first norm)."""
        x1 = self.images1
        if self.basis.shape[1] == 0:
            return np.zeros((0, 0))
        if x1.shape[0] == 0:
            return np.eye(self.basis.shape[1])
        return scipy.linalg.null_space(x1, rcond=tolerance("rank"))


def dual_domain(cd: CommonDomain) -> np.ndarray:
    """
    Basis of D* in H2: vectors h whose functional phi -> <phi, h>_2 on D is bounded in the
    first norm, i.e. h orthogonal to the H2 image of every first-norm null direction.
    """
    nulls = cd.null_directions()
    if nulls.size == 0:
        return np.eye(cd.second.dim)
    return orthogonal_complement(cd.images2 @ nulls, cd.second.gram)
