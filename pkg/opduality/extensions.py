# -*- coding: utf-8 -*-
"""
@author:XuMing(xuming624@qq.com)
@description: Semibounded operators, their Friedrichs extension and the Krein set.

An operator A >= 1 on a domain D gives the Hilbert space H_A with <phi, psi>_A = <phi, A psi>;
with J the inclusion of H_A into H, (JJ*)^-1 extends A. Also the form/operator bijection,
membership in the Krein set of contractive inverses, and the density probe for A D.
"""
from dataclasses import dataclass, field
from typing import List

import numpy as np

from opduality.base import Check, NotSemibounded, as_matrix, require, residual_norm
from opduality.config import tolerance
from opduality.hilbert_pair import OperatorBetween, WeightedSpace, adjoint, operator_norm
from opduality.linalg import gram_rank, pinv_selfadjoint, solve_dense_spd, sym_eigen
from opduality.log import logger


def _lower_bound(form: np.ndarray, gram: np.ndarray) -> float:
    """Smallest mu with form - mu * gram singular (generalized Rayleigh minimum)."""
    if form.size == 0:
        return np.inf
    sym = 0.5 * (form + form.T)
    return float(sym_eigen(solve_dense_spd(gram, sym), gram).values[0])


@dataclass(frozen=True, eq=False)
class SemiboundedForm:
    """q(phi, psi) = phi^T form_matrix psi with q(phi, phi) >= ||phi||^2."""
    space: WeightedSpace
    form_matrix: np.ndarray

    def __post_init__(self):
        form = as_matrix(self.form_matrix, "form_matrix")
        n = self.space.dim
        if form.shape != (n, n):
            raise ValueError(f"Form shape {form.shape} does not match space dim {n}")
        asym = residual_norm(form - form.T)
        if asym > tolerance("selfadjoint") * max(np.linalg.norm(form), 1.0):
            raise NotSemibounded(f"Form is not symmetric, residual {asym:.3e}", residual=asym)
        bound = _lower_bound(form, self.space.gram)
        if bound < 1.0 - tolerance("identity") * 100:
            raise NotSemibounded(f"q(phi, phi) >= ||phi||^2 fails, lower bound {bound:.6f}", residual=1.0 - bound)
        object.__setattr__(self, "form_matrix", 0.5 * (form + form.T))

    def to_operator(self) -> OperatorBetween:
        """The operator A with q(phi, psi) = <phi, A psi>."""
        return OperatorBetween(solve_dense_spd(self.space.gram, self.form_matrix), self.space, self.space)


@dataclass(frozen=True, eq=False)
class RestrictedOperator:
    """A >= 1 on the domain spanned by `domain_basis`, given by the images A @ domain_basis."""
    space: WeightedSpace
    domain_basis: np.ndarray
    images: np.ndarray

    def __post_init__(self):
        d = as_matrix(self.domain_basis, "domain_basis")
        a_d = as_matrix(self.images, "images")
        if d.shape[0] != self.space.dim or a_d.shape != d.shape:
            raise ValueError(f"Domain basis {d.shape} and images {a_d.shape} do not fit dim {self.space.dim}")
        if gram_rank(d, self.space.gram) != d.shape[1]:
            raise ValueError("Domain basis columns must be independent")
        object.__setattr__(self, "domain_basis", d)
        object.__setattr__(self, "images", a_d)
        q = self.form_gram
        asym = residual_norm(q - q.T)
        if asym > tolerance("selfadjoint") * max(np.linalg.norm(q), 1.0):
            raise NotSemibounded(f"A is not symmetric on its domain, residual {asym:.3e}", residual=asym)
        bound = _lower_bound(q, d.T @ self.space.gram @ d)
        if bound < 1.0 - tolerance("identity") * 100:
            raise NotSemibounded(f"<phi, A phi> >= ||phi||^2 fails, lower bound {bound:.6f}", residual=1.0 - bound)

    @classmethod
    def full(cls, a: OperatorBetween) -> "RestrictedOperator":
        return cls(a.domain, np.eye(a.domain.dim), a.matrix)

    @classmethod
    def on_subspace(cls, a: OperatorBetween, basis) -> "RestrictedOperator":
        basis = as_matrix(basis, "basis")
        return cls(a.domain, basis, a.matrix @ basis)

    @property
    def form_gram(self) -> np.ndarray:
        """Gram of H_A in domain coefficients: D^T G A D."""
        return self.domain_basis.T @ self.space.gram @ self.images

    @property
    def is_full(self) -> bool:
        return self.domain_basis.shape[1] == self.space.dim


@dataclass(frozen=True, eq=False)
class FriedrichsExtension:
    """
    jj_star: JJ* on H, a contraction vanishing on the complement of D.
    extension: the single-valued part of (JJ*)^-1, i.e. its pseudo-inverse.
    kernel_dim: dimension of ker(JJ*), where (JJ*)^-1 is multivalued.
    """
    jj_star: OperatorBetween
    extension: OperatorBetween
    kernel_dim: int
    checks: List[Check] = field(default_factory=list)


def friedrichs_extension(a) -> FriedrichsExtension:
    """
    Build H_A with Gram <phi, A psi>, the inclusion J: H_A -> H and (JJ*)^-1.

    Args:
        a: SemiboundedForm (full domain) or RestrictedOperator
    """
    if isinstance(a, SemiboundedForm):
        a = RestrictedOperator.full(a.to_operator())
    space, d = a.space, a.domain_basis
    q = 0.5 * (a.form_gram + a.form_gram.T)
    h_a = WeightedSpace(d.shape[1], q, "H_A")
    j = OperatorBetween(d, h_a, space)
    jj = (j @ adjoint(j))
    inverse, singular = pinv_selfadjoint(jj.matrix, space.gram)
    kernel_dim = space.dim - gram_rank(d, space.gram)
    if singular:
        logger.debug(f"JJ* has a kernel of dim {kernel_dim}, extension reported on its range")
    tol = 1e-9
    checks = [
        Check("friedrichs_inverts_A", "JJ* A phi = phi on D", residual_norm(jj.matrix @ a.images - d), tol),
        Check("friedrichs_contraction", "||JJ*|| <= 1", max(operator_norm(jj) - 1.0, 0.0), tol),
    ]
    if a.is_full:
        checks.append(Check("friedrichs_reproduces_A", "(JJ*)^-1 = A", residual_norm(inverse @ d - a.images), tol))
    else:
        # form-closure oracle: the operator S on D with <S phi, psi> = <phi, A psi>
        compressed = d @ np.linalg.solve(d.T @ space.gram @ d, q)
        checks.append(Check("friedrichs_form_operator", "(JJ*)^-1 = form operator on D",
                            residual_norm(inverse @ d - compressed), tol))
    for check in checks:
        require(check)
    return FriedrichsExtension(jj, OperatorBetween(inverse, space, space), kernel_dim, checks)


@dataclass(frozen=True)
class KreinReport:
    member: bool
    checks: List[Check]
    reasons: List[str]


def krein_membership(a: RestrictedOperator, b: OperatorBetween) -> KreinReport:
    """Whether B belongs to the Krein set of A: B = B*, ||B|| <= 1 and B A phi = phi on D."""
    checks = [
        Check("krein_selfadjoint", "B = B*", residual_norm(b.matrix - adjoint(b).matrix), tolerance("identity")),
        Check("krein_contractive", "||B|| <= 1", max(operator_norm(b) - 1.0, 0.0), 1e-10),
        Check("krein_left_inverse", "B A phi = phi on D", residual_norm(b.matrix @ a.images - a.domain_basis), 1e-9),
    ]
    reasons = [f"{c.anchor} fails (residual {c.residual:.3e})" for c in checks if not c.passed]
    return KreinReport(not reasons, checks, reasons)


def friedrichs_in_krein_set(a: RestrictedOperator) -> KreinReport:
    """JJ* of the Friedrichs construction is a member of the Krein set."""
    return krein_membership(a, friedrichs_extension(a).jj_star)


def krein_order(b1: OperatorBetween, b2: OperatorBetween) -> bool:
    """B1 <= B2 in the quadratic form sense."""
    diff = b2.matrix - b1.matrix
    values = sym_eigen(diff, b1.domain.gram).values
    return bool(values.size == 0 or values[0] >= -tolerance("rank") * max(np.abs(values).max(), 1.0))


@dataclass(frozen=True, eq=False)
class FormCorrespondence:
    form: SemiboundedForm
    square_root: np.ndarray
    round_trip: OperatorBetween
    checks: List[Check]


def form_correspondence(a: OperatorBetween) -> FormCorrespondence:
    """
    A selfadjoint, A >= 1  ->  q(phi, psi) = <A^{1/2} phi, A^{1/2} psi>  ->  (JJ*)^-1 = A.
    """
    g = a.domain.gram
    eig = sym_eigen(a.matrix, g)
    if eig.dim and eig.values[0] < 1.0 - tolerance("identity") * 100:
        raise NotSemibounded(f"A >= 1 fails, smallest eigenvalue {eig.values[0]:.6f}", residual=1.0 - eig.values[0])
    root = eig.apply(lambda lam: np.sqrt(np.clip(lam, 0.0, None)))
    form_matrix = root.T @ g @ root
    form = SemiboundedForm(a.domain, form_matrix)
    back = friedrichs_extension(form).extension
    tol = 1e-9
    checks = [
        Check("form_matches_operator", "<A^{1/2} phi, A^{1/2} psi> = <phi, A psi>",
              residual_norm(form_matrix - g @ a.matrix), tol),
        Check("form_round_trip", "A -> q -> (JJ*)^-1 returns A", residual_norm(back.matrix - a.matrix), tol),
    ]
    return FormCorrespondence(form, root, back, checks)


@dataclass(frozen=True)
class DensityReport:
    rank: int
    dim: int

    @property
    def dense(self) -> bool:
        return self.rank == self.dim


def essential_selfadjointness_probe(a: RestrictedOperator) -> DensityReport:
    """A >= 1 is essentially selfadjoint iff A D is dense; here: rank of A D against dim H."""
    return DensityReport(gram_rank(a.images, a.space.gram), a.space.dim)
