# -*- coding: utf-8 -*-
"""
@author:XuMing(xuming624@qq.com)
@description: Duality operator of two Hilbert spaces sharing a dense subspace.

For a common domain D of H1 and H2: the inclusion J, the selfadjoint Delta = J*J with
<phi, Delta phi>_1 = ||phi||_2^2, spectral measures of Delta, the partial isometry K with
K Delta^{1/2} = J, the reflection operator U_hat, and discrete measure spaces where Delta
is the Radon-Nikodym derivative.
"""
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg

from opduality.base import (
    Check,
    NotClosable,
    NotDense,
    NotIntertwining,
    NotUnitary,
    as_vector,
    require,
    residual_norm,
)
from opduality.config import tolerance
from opduality.hilbert_pair import (
    CommonDomain,
    OperatorBetween,
    WeightedSpace,
    adjoint,
    dual_domain,
    operator_norm,
)
from opduality.linalg import EigenDecomposition, gram_orthonormalize, gram_rank, orthogonal_complement, sym_eigen
from opduality.log import logger


# ============ Discrete measures ============

@dataclass(frozen=True, eq=False)
class DiscreteMeasureSpace:
    """L^2(mu) for a measure with the given nonnegative weights on labelled points."""
    points: Tuple[str, ...]
    weights: np.ndarray
    label: str = "L2(mu)"

    def __post_init__(self):
        weights = as_vector(self.weights, "weights")
        if len(weights) != len(self.points):
            raise ValueError(f"{len(weights)} weights for {len(self.points)} points")
        if np.any(weights < 0):
            raise ValueError("Measure weights must be nonnegative")
        object.__setattr__(self, "points", tuple(str(p) for p in self.points))
        object.__setattr__(self, "weights", weights)

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.weights > 0)

    def space(self) -> WeightedSpace:
        return WeightedSpace(len(self.support), np.diag(self.weights[self.support]), self.label)

    def restriction(self) -> np.ndarray:
        """Coordinate map from functions on all points to functions on the support."""
        return np.eye(len(self.points))[self.support]


def discrete_common_domain(mu1: DiscreteMeasureSpace, mu2: DiscreteMeasureSpace) -> CommonDomain:
    """D = all functions on the common point set, seen in L2(mu1) and L2(mu2)."""
    if mu1.points != mu2.points:
        raise ValueError("Measures must live on the same points")
    n = len(mu1.points)
    ambient = WeightedSpace.euclidean(n, "D")
    return CommonDomain(
        n,
        np.eye(n),
        OperatorBetween(mu1.restriction(), ambient, mu1.space()),
        OperatorBetween(mu2.restriction(), ambient, mu2.space()),
    )


def radon_nikodym(mu1: DiscreteMeasureSpace, mu2: DiscreteMeasureSpace) -> np.ndarray:
    """dmu2/dmu1 on the support of mu1; requires support(mu2) inside support(mu1)."""
    outside = np.setdiff1d(mu2.support, mu1.support)
    if outside.size:
        raise NotClosable(f"mu2 charges points outside the support of mu1: {[mu1.points[i] for i in outside]}")
    s = mu1.support
    return mu2.weights[s] / mu1.weights[s]


# ============ Inclusion and duality operator ============

def inclusion_operator(cd: CommonDomain) -> OperatorBetween:
    """J: H1 -> H2 with J(embed1 phi) = embed2 phi for phi in D."""
    x1, x2 = cd.images1, cd.images2
    if not cd.dense_in_first:
        raise NotDense(f"D spans {gram_rank(x1, cd.first.gram)} of {cd.first.dim} dimensions of {cd.first.label}")
    nulls = cd.null_directions()
    if nulls.size:
        leak = max(cd.second.norm(x2 @ nulls[:, j]) for j in range(nulls.shape[1]))
        if leak > tolerance("rank") * max(np.abs(x2).max(initial=0.0), 1.0):
            raise NotClosable(f"A first-norm null direction of D has second norm {leak:.3e}", residual=float(leak))
    return OperatorBetween(x2 @ np.linalg.pinv(x1), cd.first, cd.second)


def kernel_of_adjoint_inclusion(cd: CommonDomain) -> np.ndarray:
    """Gram-orthonormal basis of ker(J*) in H2."""
    j_star = adjoint(inclusion_operator(cd))
    if cd.second.dim == 0:
        return np.zeros((0, 0))
    nulls = scipy.linalg.null_space(j_star.matrix, rcond=tolerance("rank"))
    return gram_orthonormalize(nulls, cd.second.gram)


def kernel_complement_check(cd: CommonDomain) -> Check:
    """ker(J*) equals H2 minus the closure of D, compared as projections."""
    h2 = cd.second
    kernel = kernel_of_adjoint_inclusion(cd)
    complement = orthogonal_complement(cd.images2, h2.gram)
    p_kernel = kernel @ kernel.T @ h2.gram
    p_complement = complement @ complement.T @ h2.gram
    return Check("kernel_adjoint_inclusion", "ker(J*) = H2 minus closure of D",
                 residual_norm(p_kernel - p_complement), tolerance("rank"))


def energy_identity_check(cd: CommonDomain, delta: OperatorBetween) -> Check:
    """max over basis vectors of |<phi, Delta phi>_1 - ||phi||_2^2|, relative."""
    x1, x2 = cd.images1, cd.images2
    g1, g2 = cd.first.gram, cd.second.gram
    worst = 0.0
    for j in range(x1.shape[1]):
        lhs = x1[:, j] @ g1 @ delta.matrix @ x1[:, j]
        rhs = x2[:, j] @ g2 @ x2[:, j]
        scale = max(abs(rhs), x1[:, j] @ g1 @ x1[:, j], np.finfo(float).tiny)
        worst = max(worst, abs(lhs - rhs) / scale)
    return Check("duality_energy_identity", "<phi, Delta phi>_1 = ||phi||_2^2 on D", worst, tolerance("identity"))


def duality_operator(cd: CommonDomain) -> OperatorBetween:
    """
    Delta = J*J on H1, selfadjoint and nonnegative.

    Raises:
        NotDense: D does not span H1
        NotClosable: J is not well defined on D
    """
    j = inclusion_operator(cd)
    delta = adjoint(j) @ j
    require(energy_identity_check(cd, delta))
    return delta


def dual_domain_is_full(cd: CommonDomain) -> bool:
    return dual_domain(cd).shape[1] == cd.second.dim


# ============ Spectral measures ============

@dataclass(frozen=True)
class SpectralMeasure:
    atoms: Tuple[Tuple[float, float], ...] = field(default_factory=tuple)

    @property
    def total_mass(self) -> float:
        return float(sum(m for _, m in self.atoms))

    @property
    def first_moment(self) -> float:
        return float(sum(lam * m for lam, m in self.atoms))

    def moment_checks(self, norm1_sq: float, norm2_sq: float, tol: float = 1e-9) -> List[Check]:
        return [
            Check("spectral_total_mass", "mu_phi total mass = ||phi||_1^2",
                  abs(self.total_mass - norm1_sq) / max(norm1_sq, np.finfo(float).tiny), tol),
            Check("spectral_first_moment", "first moment of mu_phi = ||phi||_2^2",
                  abs(self.first_moment - norm2_sq) / max(norm2_sq, norm1_sq, np.finfo(float).tiny), tol),
        ]


def spectral_measure(delta: OperatorBetween, phi, eig: Optional[EigenDecomposition] = None) -> SpectralMeasure:
    """
    Atoms (lambda, ||P_lambda phi||_1^2) of the spectral measure of Delta at phi.
    Nearly equal eigenvalues are merged; atoms of negligible mass are dropped.
    A precomputed eigendecomposition of Delta may be passed in when measuring many vectors.
    """
    phi = as_vector(phi, "phi")
    g = delta.domain.gram
    norm_sq = phi @ g @ phi
    if norm_sq == 0.0:
        return SpectralMeasure()
    eig = eig if eig is not None else sym_eigen(delta.matrix, g)
    lam = np.clip(eig.values, 0.0, None)
    mass = (eig.vectors.T @ g @ phi) ** 2
    merge_tol = tolerance("rank") * max(np.abs(eig.values).max(initial=0.0), 1.0)
    atoms: List[List[float]] = []
    for value, m in zip(lam, mass):
        if atoms and value - atoms[-1][0] <= merge_tol:
            atoms[-1][1] += m
        else:
            atoms.append([value, m])
    floor = 1e-12 * norm_sq
    return SpectralMeasure(tuple((float(v), float(m)) for v, m in atoms if m > floor))


# ============ Partial isometry and reflection ============

def _delta_powers(delta: OperatorBetween):
    eig = sym_eigen(delta.matrix, delta.domain.gram)
    lam = np.clip(eig.values, 0.0, None)
    mask = eig.kernel_mask()
    inv_root = np.zeros_like(lam)
    inv_root[~mask] = 1.0 / np.sqrt(lam[~mask])
    inv = np.zeros_like(lam)
    inv[~mask] = 1.0 / lam[~mask]
    return eig, inv_root, inv, mask


def partial_isometry_k(cd: CommonDomain) -> OperatorBetween:
    """K = J Delta^{-1/2} on ran(Delta^{1/2}), zero on its complement."""
    j = inclusion_operator(cd)
    delta = adjoint(j) @ j
    eig, inv_root, _, _ = _delta_powers(delta)
    return OperatorBetween(j.matrix @ eig.apply(lambda _: inv_root), cd.first, cd.second)


def partial_isometry_checks(cd: CommonDomain, k: OperatorBetween) -> List[Check]:
    j = inclusion_operator(cd)
    delta = adjoint(j) @ j
    eig, _, _, mask = _delta_powers(delta)
    range_projection = eig.apply(lambda _: (~mask).astype(float))
    kk = (adjoint(k) @ k).matrix
    dual = (j @ adjoint(j)).matrix
    x1, x2 = cd.images1, cd.images2
    worst = 0.0
    for c in range(x1.shape[1]):
        kphi = k.matrix @ x1[:, c]
        lhs = cd.second.inner(kphi, dual @ kphi)
        rhs = cd.second.inner(x2[:, c], x2[:, c])
        worst = max(worst, abs(lhs - rhs) / max(rhs, np.finfo(float).tiny))
    tol = tolerance("identity")
    return [
        Check("K_partial_isometry", "K*K is idempotent", residual_norm(kk @ kk - kk), tol),
        Check("K_initial_space", "K*K projects onto ran(Delta^{1/2})", residual_norm(kk - range_projection), tol * 10),
        Check("K_dual_energy", "<K phi, JJ* K phi>_2 = ||phi||_2^2", worst, 1e-9),
    ]


def _check_reflection_input(delta: OperatorBetween, u: OperatorBetween):
    u_star = adjoint(u).matrix
    unitary = residual_norm(u_star @ u.matrix - np.eye(u.domain.dim))
    if unitary > tolerance("intertwining"):
        raise NotUnitary(f"U*U - I has norm {unitary:.3e}", residual=unitary)
    scale = operator_norm(delta)
    normalized = delta.matrix / scale if scale > 0 else delta.matrix
    intertwining = residual_norm(normalized @ u.matrix - u_star @ normalized)
    if intertwining > tolerance("intertwining"):
        raise NotIntertwining(f"Delta U - U^-1 Delta has norm {intertwining:.3e}", residual=intertwining)
    return u_star


def reflection_checks(cd: CommonDomain, u_hat: OperatorBetween) -> List[Check]:
    return [
        Check("reflection_selfadjoint", "U_hat = U_hat* in H2",
              residual_norm(u_hat.matrix - adjoint(u_hat).matrix), tolerance("identity")),
        Check("reflection_contractive", "||U_hat|| <= 1", max(operator_norm(u_hat) - 1.0, 0.0), 1e-10),
    ]


def reflection_hat(cd: CommonDomain, u: OperatorBetween) -> OperatorBetween:
    """
    U_hat on H2 with <U_hat phi, psi>_2 = <Delta U phi, psi>_1 on D, zero on ker(J*):
    U_hat = J U Delta^+ J*.

    Raises:
        NotUnitary, NotIntertwining: input conditions fail, residual attached
    """
    j = inclusion_operator(cd)
    j_star = adjoint(j)
    delta = j_star @ j
    _check_reflection_input(delta, u)
    eig, _, inv, _ = _delta_powers(delta)
    u_hat = OperatorBetween(j.matrix @ u.matrix @ eig.apply(lambda _: inv) @ j_star.matrix, cd.second, cd.second)
    for check in reflection_checks(cd, u_hat):
        require(check)
    return u_hat


@dataclass(frozen=True)
class SchwarzTrace:
    """|<U_hat phi, phi>_2| against the iterated Cauchy-Schwarz bounds, which tend to ||phi||_2^2."""
    value: float
    bounds: Tuple[float, ...]
    limit: float

    def check(self) -> Check:
        excess = max((self.value - b for b in self.bounds), default=0.0)
        excess = max(excess, self.value - self.limit)
        return Check("reflection_schwarz_bounds", "|<U_hat phi, phi>_2| below every Schwarz bound",
                     max(excess, 0.0) / max(self.limit, np.finfo(float).tiny), 1e-9)


def schwarz_bounds(cd: CommonDomain, u: OperatorBetween, coefficients, steps: int = 8) -> SchwarzTrace:
    """
    bound_n = |<U^(2^n) phi, Delta phi>_1|^(1/2^n) * <phi, Delta phi>_1^(1 - 1/2^n) for phi in D
    given by its basis coefficients.
    """
    c = as_vector(coefficients, "coefficients")
    phi1, phi2 = cd.images1 @ c, cd.images2 @ c
    delta = duality_operator(cd)
    u_hat = reflection_hat(cd, u)
    g1 = cd.first.gram
    d_phi = delta.matrix @ phi1
    energy = float(phi1 @ g1 @ d_phi)
    power = u.matrix.copy()
    bounds = []
    for n in range(1, steps + 1):
        power = power @ power
        base = abs(float((power @ phi1) @ g1 @ d_phi))
        bounds.append(base ** (0.5 ** n) * energy ** (1.0 - 0.5 ** n))
    value = abs(cd.second.inner(u_hat.matrix @ phi2, phi2))
    logger.debug(f"Schwarz trace: value={value:.6e}, last bound={bounds[-1] if bounds else energy:.6e}")
    return SchwarzTrace(value, tuple(bounds), energy)
