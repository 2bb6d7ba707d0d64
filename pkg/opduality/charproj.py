# -*- coding: utf-8 -*-
"""
@author:XuMing(xuming624@qq.com)
@description: Characteristic projections.

The orthogonal projection E onto the closure of a graph inside H1 + H2, written as a 2x2
block operator. Stone's formulas for the blocks, the block identities, Schur complements,
closability of arbitrary subspaces and their maximal closable part.
"""
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from opduality.base import Check, NotAGraph, SingularBlock, as_matrix, require, residual_norm
from opduality.config import tolerance
from opduality.hilbert_pair import DirectSum, OperatorBetween, adjoint, complement_projection, v_flip
from opduality.linalg import gram_orthonormalize, null_space, pinv_selfadjoint, sym_eigen
from opduality.log import logger


@dataclass(frozen=True, eq=False)
class BlockProjection:
    """E = [[e11, e12], [e21, e22]] acting on ambient = H1 + H2."""
    e11: np.ndarray
    e12: np.ndarray
    e21: np.ndarray
    e22: np.ndarray
    ambient: DirectSum

    def __post_init__(self):
        n1, n2 = self.ambient.first.dim, self.ambient.second.dim
        expected = {"e11": (n1, n1), "e12": (n1, n2), "e21": (n2, n1), "e22": (n2, n2)}
        for name, shape in expected.items():
            block = np.asarray(getattr(self, name), dtype=float).reshape(shape)
            object.__setattr__(self, name, block)

    @property
    def matrix(self) -> np.ndarray:
        return np.block([[self.e11, self.e12], [self.e21, self.e22]])

    def adjoint_matrix(self) -> np.ndarray:
        """E* with respect to the block Gram."""
        op = OperatorBetween(self.matrix, self.ambient.space, self.ambient.space)
        return adjoint(op).matrix

    def residuals(self) -> List[Check]:
        e = self.matrix
        tol = tolerance("identity")
        return [
            Check("projection_idempotent", "E^2 = E", residual_norm(e @ e - e), tol),
            Check("projection_selfadjoint", "E = E* in the block Gram", residual_norm(e - self.adjoint_matrix()), tol),
        ]


def char_projection(t: OperatorBetween) -> BlockProjection:
    """
    Stone's formulas:
    E11 = (I+T*T)^-1, E21 = T(I+T*T)^-1, E12 = T*(I+TT*)^-1, E22 = TT*(I+TT*)^-1.
    """
    n1, n2 = t.domain.dim, t.codomain.dim
    t_mat = t.matrix
    t_star = adjoint(t).matrix
    inv1 = np.linalg.solve(np.eye(n1) + t_star @ t_mat, np.eye(n1)) if n1 else np.zeros((0, 0))
    inv2 = np.linalg.solve(np.eye(n2) + t_mat @ t_star, np.eye(n2)) if n2 else np.zeros((0, 0))
    e = BlockProjection(
        e11=inv1,
        e12=t_star @ inv2,
        e21=t_mat @ inv1,
        e22=t_mat @ t_star @ inv2,
        ambient=DirectSum(t.domain, t.codomain),
    )
    for check in e.residuals():
        require(check)
    return e


def char_projection_of_adjoint(e: BlockProjection) -> BlockProjection:
    """The projection onto the graph of T*, on the swapped sum: [[I-E22, E21], [E12, I-E11]]."""
    n1, n2 = e.ambient.first.dim, e.ambient.second.dim
    return BlockProjection(
        e11=np.eye(n2) - e.e22,
        e12=e.e21,
        e21=e.e12,
        e22=np.eye(n1) - e.e11,
        ambient=e.ambient.swapped(),
    )


def adjoint_consistency(t: OperatorBetween) -> List[Check]:
    """Projection of T* three ways: block swap, Stone's formulas on T*, and I - V E V*."""
    e = char_projection(t)
    swapped = char_projection_of_adjoint(e).matrix
    direct = char_projection(adjoint(t)).matrix
    flipped = complement_projection(v_flip(e.ambient), e.matrix)
    tol = tolerance("identity")
    return [
        Check("adjoint_projection_blocks", "E of T* from the blocks of E", residual_norm(swapped - direct), tol),
        Check("adjoint_projection_flip", "E of T* = I - V E V*", residual_norm(flipped - direct), tol),
    ]


def stone_identities(t: OperatorBetween, e: BlockProjection) -> List[Check]:
    """Residuals of the block identities linking T, T* and the entries of E."""
    t_mat = t.matrix
    t_star = adjoint(t).matrix
    n1, n2 = t.domain.dim, t.codomain.dim
    i1, i2 = np.eye(n1), np.eye(n2)
    inv1 = np.linalg.solve(i1 + t_star @ t_mat, i1) if n1 else np.zeros((0, 0))
    inv2 = np.linalg.solve(i2 + t_mat @ t_star, i2) if n2 else np.zeros((0, 0))
    tol = tolerance("identity")
    pairs = [
        ("T_E11", "T E11 = E21", t_mat @ e.e11 - e.e21),
        ("T_E12", "T E12 = E22", t_mat @ e.e12 - e.e22),
        ("Tstar_complement_E22", "T*(I - E22) = E12", t_star @ (i2 - e.e22) - e.e12),
        ("Tstar_E21", "T* E21 = I - E11", t_star @ e.e21 - (i1 - e.e11)),
        ("E12_left_form", "E12 = (I + T*T)^-1 T*", inv1 @ t_star - e.e12),
        ("E21_left_form", "E21 = (I + TT*)^-1 T", inv2 @ t_mat - e.e21),
        ("E22_sandwich", "E22 = T (I + T*T)^-1 T*", t_mat @ inv1 @ t_star - e.e22),
        ("E11_complement", "I - E11 = T*(I + TT*)^-1 T", t_star @ inv2 @ t_mat - (i1 - e.e11)),
    ]
    return [Check(name, anchor, residual_norm(diff), tol) for name, anchor, diff in pairs]


@dataclass(frozen=True, eq=False)
class SchurComplements:
    over_e11: np.ndarray
    over_e22: np.ndarray
    pseudo_inverse: bool

    def checks(self, tol: float = 1e-9) -> List[Check]:
        note = " (pseudo-inverse of E22)" if self.pseudo_inverse else ""
        return [
            Check("schur_over_E11", "E22 - E21 E11^-1 E12 = 0", residual_norm(self.over_e11), tol),
            Check("schur_over_E22", "E11 - E12 E22^+ E21 = 0" + note, residual_norm(self.over_e22), tol),
        ]


def schur_complements(e: BlockProjection, strict: bool = False) -> SchurComplements:
    """
    Both Schur complements of a characteristic projection. E22 is inverted on its range;
    with strict=True a singular E22 raises SingularBlock instead.
    """
    g1, g2 = e.ambient.first.gram, e.ambient.second.gram
    eig11 = sym_eigen(e.e11, g1)
    if eig11.dim and eig11.values.min() <= tolerance("rank") * max(np.abs(eig11.values).max(), 1.0):
        raise SingularBlock(f"E11 has eigenvalue {eig11.values.min():.3e}", residual=float(eig11.values.min()))
    inv11 = eig11.apply(lambda lam: 1.0 / lam) if eig11.dim else np.zeros((0, 0))
    if e.e22.size:
        inv22, singular = pinv_selfadjoint(e.e22, g2)
    else:
        inv22, singular = np.zeros((0, 0)), False
    if singular:
        if strict:
            raise SingularBlock("E22 is singular, pseudo-inverse required")
        logger.debug("E22 singular, Schur complement over E22 uses the pseudo-inverse")
    return SchurComplements(
        over_e11=e.e22 - e.e21 @ inv11 @ e.e12,
        over_e22=e.e11 - e.e12 @ inv22 @ e.e21,
        pseudo_inverse=singular,
    )


def cesaro_mean(e22, steps: int) -> np.ndarray:
    """(1/(n+1)) * sum_{k=0}^{n} E22^k."""
    e22 = as_matrix(e22, "e22")
    power = np.eye(e22.shape[0])
    total = np.zeros_like(power)
    for _ in range(steps + 1):
        total += power
        power = power @ e22
    return total / (steps + 1)


@dataclass(frozen=True, eq=False)
class GraphAnalysis:
    projection: BlockProjection
    closable: bool
    singular_dim: int
    q_projection: np.ndarray
    kernel_basis: np.ndarray
    closable_part: Optional[OperatorBetween] = None
    cesaro: Optional[Check] = None


def cesaro_check(e22: np.ndarray, kernel_basis: np.ndarray, gram: np.ndarray, steps: int) -> Check:
    """
    Distance between the Cesaro mean of E22 powers and the projection onto ker(I - E22),
    held to the rate bound 1/((n+1)(1 - lambda)) with lambda the largest eigenvalue below 1.
    """
    projection = kernel_basis @ kernel_basis.T @ gram
    diff = cesaro_mean(e22, steps) - projection
    if diff.size == 0:
        return Check("cesaro_kernel_projection", "Cesaro mean of E22^k -> P_ker(I-E22)", 0.0, 0.0)
    residual = float(np.abs(sym_eigen(0.5 * (diff + np.linalg.solve(gram, diff.T @ gram)), gram).values).max())
    values = sym_eigen(e22, gram).values
    below = values[values < 1.0 - tolerance("rank")]
    top = below.max() if below.size else 0.0
    bound = 1.0 / ((steps + 1) * (1.0 - top)) + 1e-12
    return Check("cesaro_kernel_projection", "Cesaro mean of E22^k -> P_ker(I-E22)", residual, bound)


def analyze_graph(
        generators,
        ambient: DirectSum,
        closable_part: bool = True,
        require_graph: bool = False,
        cesaro_steps: Optional[int] = None,
) -> GraphAnalysis:
    """
    Characteristic projection of the span of arbitrary generator columns in H1 + H2.

    Args:
        generators: columns in the coordinates of `ambient`
        ambient: the direct sum the generators live in
        closable_part: reconstruct the maximal closable part T_clo
        require_graph: raise NotAGraph when the span is not the graph of an operator
        cesaro_steps: if given, cross-check the kernel projection by Cesaro means
    """
    x = as_matrix(generators, "generators")
    if x.shape[0] != ambient.dim:
        raise ValueError(f"Generators have {x.shape[0]} rows, ambient dim is {ambient.dim}")
    if x.shape[1] == 0 or np.any(np.abs(x).max(axis=0) == 0):
        raise ValueError("Generator columns must be nonzero")
    n1, n2 = ambient.first.dim, ambient.second.dim
    g2 = ambient.second.gram
    q = gram_orthonormalize(x, ambient.gram)
    e = q @ q.T @ ambient.gram
    bp = BlockProjection(e[:n1, :n1], e[:n1, n1:], e[n1:, :n1], e[n1:, n1:], ambient)
    kernel = null_space(np.eye(n2) - bp.e22, g2) if n2 else np.zeros((0, 0))
    singular_dim = kernel.shape[1] if n2 else 0
    logger.debug(f"Graph analysis: rank {q.shape[1]}, singular part dim {singular_dim}")
    if require_graph and singular_dim:
        raise NotAGraph(f"Span contains {singular_dim} vertical directions (0, psi)")
    q_proj = np.eye(n2) - kernel @ kernel.T @ g2 if n2 else np.zeros((0, 0))
    t_clo = None
    if closable_part:
        # T_clo E11 = Q E21
        target = q_proj @ bp.e21
        sol, *_ = np.linalg.lstsq(bp.e11.T, target.T, rcond=None)
        t_clo = OperatorBetween(sol.T, ambient.first, ambient.second)
    ces = cesaro_check(bp.e22, kernel, g2, cesaro_steps) if cesaro_steps is not None and n2 else None
    return GraphAnalysis(
        projection=bp,
        closable=singular_dim == 0,
        singular_dim=singular_dim,
        q_projection=q_proj,
        kernel_basis=kernel,
        closable_part=t_clo,
        cesaro=ces,
    )


def closable_part_projection(analysis: GraphAnalysis) -> BlockProjection:
    """[[E11, E12 Q], [Q E21, E22 Q]], the projection of the closable part."""
    e, q = analysis.projection, analysis.q_projection
    return BlockProjection(e.e11, e.e12 @ q, q @ e.e21, e.e22 @ q, e.ambient)
