# -*- coding: utf-8 -*-
"""
@author:XuMing(xuming624@qq.com)
@description: Dense and sparse linear algebra primitives shared by every other module.

Gram-aware eigensolver (Cholesky reduction + cyclic Jacobi), diagonal-preconditioned
conjugate gradient for sparse SPD systems and grounded Laplacians, kernels, ranks and
operator functions of selfadjoint matrices.
"""
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
import scipy.sparse

from opduality import config
from opduality.base import (
    InconsistentRHS,
    NoConvergence,
    NotSelfadjoint,
    NotSPD,
    as_matrix,
    as_vector,
)
from opduality.config import tolerance
from opduality.log import logger


# ============ Sparse storage ============

@dataclass(frozen=True)
class SparseSymmetric:
    """Upper-triangle triplet storage of a symmetric matrix."""
    dim: int
    triplets: Tuple[Tuple[int, int, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        seen = set()
        for row, col, _ in self.triplets:
            if not (0 <= row <= col < self.dim):
                raise ValueError(f"Triplet ({row}, {col}) outside the upper triangle of a {self.dim}x{self.dim} matrix")
            if (row, col) in seen:
                raise ValueError(f"Duplicate triplet ({row}, {col})")
            seen.add((row, col))
        object.__setattr__(self, "triplets", tuple((int(r), int(c), float(v)) for r, c, v in self.triplets))

    @classmethod
    def from_dense(cls, m) -> "SparseSymmetric":
        m = as_matrix(m)
        if m.shape[0] != m.shape[1] or not np.allclose(m, m.T, rtol=0, atol=1e-14 * max(np.abs(m).max(), 1.0)):
            raise ValueError("from_dense expects a symmetric square matrix")
        rows, cols = np.nonzero(np.triu(m))
        return cls(m.shape[0], tuple((r, c, m[r, c]) for r, c in zip(rows, cols)))

    def to_csr(self) -> scipy.sparse.csr_matrix:
        if not self.triplets:
            return scipy.sparse.csr_matrix((self.dim, self.dim))
        rows, cols, vals = (np.array(x) for x in zip(*self.triplets))
        off = rows != cols
        all_rows = np.concatenate([rows, cols[off]])
        all_cols = np.concatenate([cols, rows[off]])
        all_vals = np.concatenate([vals, vals[off]])
        return scipy.sparse.coo_matrix((all_vals, (all_rows, all_cols)), shape=(self.dim, self.dim)).tocsr()

    def to_dense(self) -> np.ndarray:
        return self.to_csr().toarray()


# ============ Factorizations ============

def cholesky_spd(m) -> np.ndarray:
    """
    Lower-triangular Cholesky factor L with L @ L.T = m.

    Raises NotSPD for non-symmetric input or when a pivot is at most
    the `spd` tolerance times the largest diagonal entry.
    """
    m = as_matrix(m)
    n = m.shape[0]
    if m.shape != (n, n):
        raise NotSPD(f"Gram must be square, got shape {m.shape}")
    if n == 0:
        return np.zeros((0, 0))
    scale = max(np.abs(m).max(), np.finfo(float).tiny)
    asym = np.abs(m - m.T).max()
    if asym > 1e-12 * scale:
        raise NotSPD("Matrix is not symmetric", residual=float(asym))
    try:
        lower = scipy.linalg.cholesky(m, lower=True)
    except np.linalg.LinAlgError as e:
        raise NotSPD(f"Cholesky factorization failed: {e}") from None
    pivots = np.diag(lower) ** 2
    floor = tolerance("spd") * max(np.diag(m).max(), 0.0)
    if pivots.min() <= floor:
        raise NotSPD(f"Pivot {pivots.min():.3e} below threshold {floor:.3e}", residual=float(pivots.min()))
    return lower


def jacobi_eigh(c: np.ndarray, tol: Optional[float] = None, max_sweeps: Optional[int] = None):
    """
    Cyclic Jacobi diagonalization of a symmetric matrix, row-major sweep order.
    Stops when the off-diagonal Frobenius norm is at most tol times the full norm.
    """
    a = np.array(c, dtype=float)
    n = a.shape[0]
    tol = tolerance("jacobi") if tol is None else tol
    max_sweeps = config.JACOBI_MAX_SWEEPS if max_sweeps is None else max_sweeps
    v = np.eye(n)
    scale = np.linalg.norm(a)
    if n == 0 or scale == 0.0:
        return np.diag(a).copy(), v
    for sweep in range(max_sweeps + 1):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            logger.debug(f"Jacobi converged after {sweep} sweeps, dim={n}, off={off:.2e}")
            return np.diag(a).copy(), v
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.hypot(theta, 1.0))
                cs = 1.0 / np.hypot(t, 1.0)
                sn = t * cs
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = cs * ap - sn * aq
                a[:, q] = sn * ap + cs * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = cs * ap - sn * aq
                a[q, :] = sn * ap + cs * aq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = cs * vp - sn * vq
                v[:, q] = sn * vp + cs * vq
    raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps", residual=float(off / scale))


@dataclass(frozen=True)
class EigenDecomposition:
    """Generalized eigenpairs a @ v_i = values[i] * v_i with v_i^T gram v_j = delta_ij."""
    values: np.ndarray
    vectors: np.ndarray
    gram: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.values)

    def apply(self, func: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Matrix of func(a) = V diag(func(values)) V^T gram."""
        return (self.vectors * func(self.values)) @ self.vectors.T @ self.gram

    def kernel_mask(self, rel_tol: Optional[float] = None, floor: float = 1.0) -> np.ndarray:
        """
        Eigenvalues at most rel_tol * max(max|lambda|, floor) count as kernel, so an operator
        that is zero up to round-off is all kernel.
        """
        rel_tol = tolerance("rank") if rel_tol is None else rel_tol
        scale = max(np.abs(self.values).max(initial=0.0), floor)
        if scale == 0.0:
            return np.ones(self.dim, dtype=bool)
        return np.abs(self.values) <= rel_tol * scale


def sym_eigen(a, gram) -> EigenDecomposition:
    """
    Generalized eigendecomposition of an operator selfadjoint w.r.t. `gram`.

    Args:
        a: square matrix with gram @ a symmetric
        gram: SPD Gram matrix of the space
    Returns:
        EigenDecomposition with ascending values and Gram-orthonormal vectors
    """
    a = as_matrix(a, "a")
    gram = as_matrix(gram, "gram")
    n = gram.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"Operator shape {a.shape} does not match Gram dim {n}")
    lower = cholesky_spd(gram)
    ga = gram @ a
    asym = np.linalg.norm(ga - ga.T)
    if asym > tolerance("selfadjoint") * max(np.linalg.norm(ga), np.linalg.norm(gram)):
        raise NotSelfadjoint(f"gram @ a asymmetric, residual {asym:.3e}", residual=float(asym))
    if n == 0:
        return EigenDecomposition(np.zeros(0), np.zeros((0, 0)), gram)
    sym = 0.5 * (ga + ga.T)
    half = scipy.linalg.solve_triangular(lower, sym, lower=True)
    c = scipy.linalg.solve_triangular(lower, half.T, lower=True)
    c = 0.5 * (c + c.T)
    if n > config.JACOBI_MAX_DIM:
        logger.debug(f"Eigenproblem of dim {n} delegated to LAPACK (limit {config.JACOBI_MAX_DIM})")
        values, y = scipy.linalg.eigh(c)
    else:
        values, y = jacobi_eigh(c)
    order = np.argsort(values, kind="stable")
    values, y = values[order], y[:, order]
    vectors = scipy.linalg.solve_triangular(lower.T, y, lower=False)
    # fix signs: largest component of each vector positive
    lead = np.abs(vectors).argmax(axis=0)
    signs = np.where(vectors[lead, np.arange(n)] < 0, -1.0, 1.0)
    return EigenDecomposition(values, vectors * signs, gram)


def null_space(m, gram, floor: float = 1.0) -> np.ndarray:
    """Gram-orthonormal basis (as columns) of the kernel of a selfadjoint m."""
    eig = sym_eigen(m, gram)
    return eig.vectors[:, eig.kernel_mask(floor=floor)]


def pinv_selfadjoint(m, gram, floor: float = 1.0) -> Tuple[np.ndarray, bool]:
    """
    Eigen-thresholded pseudo-inverse of a selfadjoint operator.

    Args:
        floor: smallest scale the kernel cutoff is measured against
    Returns:
        (pseudo-inverse, singular flag)
    """
    eig = sym_eigen(m, gram)
    mask = eig.kernel_mask(floor=floor)
    inv = np.zeros_like(eig.values)
    inv[~mask] = 1.0 / eig.values[~mask]
    return eig.apply(lambda _: inv), bool(mask.any())


def gram_orthonormalize(columns, gram, rel_tol: Optional[float] = None) -> np.ndarray:
    """
    Modified Gram-Schmidt with one re-orthogonalization pass, in the inner product of `gram`.
    Columns whose remainder falls below rel_tol times their own norm are dropped.
    """
    x = as_matrix(columns, "columns")
    gram = as_matrix(gram, "gram")
    rel_tol = tolerance("rank") if rel_tol is None else rel_tol
    basis: List[np.ndarray] = []
    for j in range(x.shape[1]):
        v = x[:, j].copy()
        n0 = np.sqrt(max(v @ gram @ v, 0.0))
        if n0 == 0.0:
            continue
        for _ in range(2):
            for q in basis:
                v -= (q @ gram @ v) * q
        nv = np.sqrt(max(v @ gram @ v, 0.0))
        if nv <= rel_tol * n0:
            continue
        basis.append(v / nv)
    if not basis:
        return np.zeros((x.shape[0], 0))
    return np.column_stack(basis)


def gram_rank(columns, gram) -> int:
    return gram_orthonormalize(columns, gram).shape[1]


def orthogonal_complement(columns, gram) -> np.ndarray:
    """Gram-orthonormal basis of the Gram-orthogonal complement of span(columns)."""
    gram = as_matrix(gram, "gram")
    q = gram_orthonormalize(columns, gram)
    n = gram.shape[0]
    full = gram_orthonormalize(np.hstack([q, np.eye(n)]), gram)
    return full[:, q.shape[1]:]


# ============ Linear solves ============

def _as_csr(m) -> scipy.sparse.csr_matrix:
    if isinstance(m, SparseSymmetric):
        return m.to_csr()
    if scipy.sparse.issparse(m):
        return scipy.sparse.csr_matrix(m)
    return scipy.sparse.csr_matrix(as_matrix(m))


def _preconditioned_cg(a: scipy.sparse.csr_matrix, b: np.ndarray, tol: float) -> np.ndarray:
    n = a.shape[0]
    diag = a.diagonal()
    if np.any(diag <= 0):
        raise NotSPD("Non-positive diagonal entry in CG system")
    target = tol * np.linalg.norm(b)
    max_iter = config.CG_MAX_ITER_FACTOR * n
    x = np.zeros(n)
    r = b.copy()
    z = r / diag
    p = z.copy()
    rz = r @ z
    for k in range(max_iter):
        if np.linalg.norm(r) <= target:
            break
        ap = a @ p
        pap = p @ ap
        if pap <= 0:
            raise NotSPD(f"CG met a non-positive curvature {pap:.3e}")
        alpha = rz / pap
        x += alpha * p
        if (k + 1) % 50 == 0:
            r = b - a @ x
        else:
            r -= alpha * ap
        z = r / diag
        rz_next = r @ z
        p = z + (rz_next / rz) * p
        rz = rz_next
    residual = np.linalg.norm(a @ x - b)
    if residual > target:
        raise NoConvergence(
            f"CG residual {residual:.3e} above {target:.3e} after {max_iter} iterations", residual=float(residual)
        )
    logger.debug(f"CG converged, dim={n}, residual={residual:.2e}")
    return x


def solve_spd(m: Union[SparseSymmetric, np.ndarray], rhs: Sequence[float], pin: Optional[int] = None) -> np.ndarray:
    """
    Solve m x = rhs by diagonal-preconditioned conjugate gradient.

    For a matrix annihilating constants (a graph Laplacian) the solution is pinned to 0
    at index `pin` (default 0) after checking that rhs sums to zero.

    Raises:
        InconsistentRHS: rhs not orthogonal to the constants in the grounded case
        NoConvergence: residual target not met in CG_MAX_ITER_FACTOR * dim iterations
    """
    a = _as_csr(m)
    b = as_vector(rhs, "rhs")
    n = a.shape[0]
    if b.shape[0] != n:
        raise ValueError(f"rhs length {b.shape[0]} does not match dim {n}")
    tol = tolerance("cg")
    if pin is None and n > 0:
        row_sums = np.abs(a @ np.ones(n)).max()
        if row_sums <= tol * max(abs(a).max(), np.finfo(float).tiny):
            pin = 0
    if pin is None:
        if not b.any():
            return np.zeros(n)
        return _preconditioned_cg(a, b, tol)
    if not 0 <= pin < n:
        raise ValueError(f"pin {pin} outside 0..{n - 1}")
    total = abs(b.sum())
    if total > tol * max(np.linalg.norm(b) * np.sqrt(n), np.finfo(float).tiny):
        raise InconsistentRHS(f"rhs sums to {b.sum():.3e}, not orthogonal to constants", residual=float(total))
    keep = np.arange(n) != pin
    x = np.zeros(n)
    if b[keep].any():
        x[keep] = _preconditioned_cg(a[keep][:, keep], b[keep], tol)
    return x


def solve_dense_spd(m, rhs) -> np.ndarray:
    """Direct Cholesky solve for small SPD systems; rhs may be a vector or a matrix."""
    m = as_matrix(m)
    cholesky_spd(m)
    return scipy.linalg.cho_solve(scipy.linalg.cho_factor(m, lower=True), np.asarray(rhs, dtype=float))
