# -*- coding: utf-8 -*-
"""
@author:XuMing(xuming624@qq.com)
@description: Symmetric pairs, defect spaces and selfadjoint extensions.

A pair A: H1 -> H2, B: H2 -> H1 with <Au, v>_2 = <u, Bv>_1 gives the symmetric block
operator L = [[0, B], [A, 0]] on H1 + H2. Its deficiency spaces are both isomorphic to the
defect space N = {u : A*B* u = -u}; selfadjoint extensions L_Q correspond to operators Q
on N with Q*(I + BB*)Q = I + BB*.

Complex vectors are kept in a real representation (real block, imaginary block) so the
rest of the package stays real.
"""
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Chebyshev
from scipy.integrate import simpson

from opduality.base import (
    Check,
    DecompositionMismatch,
    GridTooCoarse,
    PairIncompatible,
    QNotAdmissible,
    SingularC12,
    as_matrix,
    as_vector,
    require,
    residual_norm,
)
from opduality.config import tolerance
from opduality.hilbert_pair import DirectSum, OperatorBetween, WeightedSpace, adjoint, operator_norm
from opduality.linalg import cholesky_spd, gram_rank, sym_eigen
from opduality.log import logger


@dataclass(frozen=True, eq=False)
class SymmetricPair:
    a: OperatorBetween
    b: OperatorBetween

    def __post_init__(self):
        if self.a.domain.dim != self.b.codomain.dim or self.a.codomain.dim != self.b.domain.dim:
            raise ValueError("A must map H1 -> H2 and B must map H2 -> H1")

    @property
    def first(self) -> WeightedSpace:
        return self.a.domain

    @property
    def second(self) -> WeightedSpace:
        return self.a.codomain

    @property
    def residual(self) -> float:
        """|| A^T G2 - G1 B ||, relative to the size of A^T G2."""
        lhs = self.a.matrix.T @ self.second.gram
        rhs = self.first.gram @ self.b.matrix
        return residual_norm(lhs - rhs) / max(residual_norm(lhs), 1.0)

    def check(self) -> Check:
        return Check("pair_compatibility", "<Au, v>_2 = <u, Bv>_1", self.residual, tolerance("identity"))


def build_l(pair: SymmetricPair) -> OperatorBetween:
    """L[x; y] = [B y; A x] on H1 + H2, checked symmetric."""
    compat = pair.check()
    if not compat.passed:
        raise PairIncompatible(f"Pair residual {compat.residual:.3e} too large", residual=compat.residual)
    ds = DirectSum(pair.first, pair.second)
    n1, n2 = pair.first.dim, pair.second.dim
    matrix = np.block([
        [np.zeros((n1, n1)), pair.b.matrix],
        [pair.a.matrix, np.zeros((n2, n2))],
    ])
    l_op = OperatorBetween(matrix, ds.space, ds.space)
    require(l_symmetry_check(l_op))
    return l_op


def l_symmetry_check(l_op: OperatorBetween) -> Check:
    kl = l_op.domain.gram @ l_op.matrix
    residual = residual_norm(kl - kl.T) / max(residual_norm(kl), 1.0)
    return Check("L_symmetric", "<L xi, eta>_K = <xi, L eta>_K", residual, tolerance("identity"))


# ============ Defect models ============

@dataclass(frozen=True, eq=False)
class DefectModel:
    """
    The defect space N in coordinates: `gram` is the inner product inherited from H1,
    `bb_star_action` the action of BB* on N and `b_star_action` the coordinates of B*
    restricted to N, which identify B*N inside H2. `ab_star_action` is A*B* on N, -I when
    N is exactly the -1 eigenspace; L* reads A* off it.
    """
    dim: int
    gram: np.ndarray
    bb_star_action: np.ndarray
    b_star_action: Optional[np.ndarray] = None
    label: str = "N"
    checks: Tuple[Check, ...] = ()
    ab_star_action: Optional[np.ndarray] = None

    def __post_init__(self):
        n = self.dim
        gram = as_matrix(self.gram, "gram") if n else np.zeros((0, 0))
        bb = as_matrix(self.bb_star_action, "bb_star_action") if n else np.zeros((0, 0))
        if gram.shape != (n, n) or bb.shape != (n, n):
            raise ValueError(f"Defect model blocks must be {n}x{n}")
        if n:
            cholesky_spd(gram)
            values = sym_eigen(np.eye(n) + bb, gram).values
            if values[0] < -tolerance("rank"):
                raise ValueError(f"I + BB* is not nonnegative, smallest eigenvalue {values[0]:.3e}")
        if self.b_star_action is None:
            b_star = -sym_eigen(bb, gram).apply(lambda lam: np.sqrt(np.clip(lam, 0.0, None))) if n else bb
        else:
            b_star = as_matrix(self.b_star_action, "b_star_action") if n else np.zeros((0, 0))
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "bb_star_action", bb)
        object.__setattr__(self, "b_star_action", b_star)
        given = n and self.ab_star_action is not None
        ab = as_matrix(self.ab_star_action, "ab_star_action") if given else -np.eye(n)
        if ab.shape != (n, n):
            raise ValueError(f"A*B* action must be {n}x{n}, got {ab.shape}")
        object.__setattr__(self, "ab_star_action", ab)

    @property
    def indices(self) -> Tuple[int, int]:
        return self.dim, self.dim

    @property
    def space(self) -> WeightedSpace:
        return WeightedSpace(self.dim, self.gram, self.label)

    @property
    def second_gram(self) -> np.ndarray:
        """Gram of B*N inside H2 in b_star coordinates, so that ||B* u||^2 = <u, BB* u>."""
        if self.dim == 0:
            return np.zeros((0, 0))
        b_inv = np.linalg.inv(self.b_star_action)
        h = b_inv.T @ self.gram @ self.bb_star_action @ b_inv
        return 0.5 * (h + h.T)

    @property
    def adjoint_l(self) -> np.ndarray:
        """L* on N + B*N: [x; y] -> [A* y; B* x] with A* = (A*B*) b^-1 on B*N."""
        n = self.dim
        b = self.b_star_action
        a_star = self.ab_star_action @ np.linalg.inv(b) if n else np.zeros((0, 0))
        return np.block([[np.zeros((n, n)), a_star], [b, np.zeros((n, n))]]) if n else np.zeros((0, 0))

    @property
    def sum_gram(self) -> np.ndarray:
        return np.block([
            [self.gram, np.zeros((self.dim, self.dim))],
            [np.zeros((self.dim, self.dim)), self.second_gram],
        ]) if self.dim else np.zeros((0, 0))


@dataclass(frozen=True)
class DefectReport:
    dim: int
    nearest_distance: float
    model: Optional[DefectModel] = None

    @property
    def indices(self) -> Tuple[int, int]:
        return self.dim, self.dim


def _minus_one_eigenspace(m: np.ndarray) -> Tuple[np.ndarray, float]:
    if m.size == 0:
        return np.zeros((0, 0)), np.inf
    values, vectors = np.linalg.eig(m)
    distance = np.abs(values + 1.0)
    mask = distance <= tolerance("kernel_eigen")
    return np.real(vectors[:, mask]), float(distance.min())


def defect_space(pair: SymmetricPair) -> DefectReport:
    """
    Eigenvectors of A*B* with eigenvalue -1. For a finite pair B = A*, so A*B* = A*A is
    nonnegative and the defect space is empty: indices (0, 0).
    """
    a_star, b_star = adjoint(pair.a), adjoint(pair.b)
    m = (a_star @ b_star).matrix
    vectors, distance = _minus_one_eigenspace(m)
    dim = gram_rank(vectors, pair.first.gram) if vectors.size else 0
    logger.debug(f"Defect space: dim {dim}, nearest eigenvalue at distance {distance:.3e} from -1")
    if dim == 0:
        return DefectReport(0, distance)
    bb = (pair.b @ b_star).matrix
    gram = vectors.T @ pair.first.gram @ vectors
    action, *_ = np.linalg.lstsq(vectors, bb @ vectors, rcond=None)
    ab_action, *_ = np.linalg.lstsq(vectors, m @ vectors, rcond=None)
    return DefectReport(dim, distance, DefectModel(dim, gram, action, ab_star_action=ab_action))


def deficiency_indices(pair: SymmetricPair) -> Tuple[int, int]:
    """Dimensions of N_{-1}(A*B*) in H1 and N_{-1}(B*A*) in H2; they always agree."""
    a_star, b_star = adjoint(pair.a), adjoint(pair.b)
    v1, _ = _minus_one_eigenspace((a_star @ b_star).matrix)
    v2, _ = _minus_one_eigenspace((b_star @ a_star).matrix)
    d_plus = gram_rank(v1, pair.first.gram) if v1.size else 0
    d_minus = gram_rank(v2, pair.second.gram) if v2.size else 0
    return d_plus, d_minus


# ============ Interval example ============

_CANDIDATES = (np.exp, lambda t: np.exp(-t))


def _exponential_gram(x: np.ndarray) -> np.ndarray:
    u = np.vstack([f(x) for f in _CANDIDATES])
    return np.array([[simpson(u[i] * u[j], x=x) for j in range(2)] for i in range(2)])


def interval_defect_model(grid_points: int = 256, interval: Tuple[float, float] = (0.0, 1.0)) -> DefectModel:
    """
    Defect space of -d^2/dx^2 against the inclusion on a finite interval: u'' = u, spanned
    by e^x and e^-x. The Gram is computed by Simpson quadrature. BB* (u -> u'') and A*B*
    (u -> -u'') are assembled on the span from Chebyshev second derivatives and must act
    as I and -I.

    Raises:
        GridTooCoarse: Gram entries move by more than the quadrature tolerance under refinement
        VerificationError: the assembled BB* is not the identity on the span
    """
    lo, hi = map(float, interval)
    if grid_points < 16:
        raise ValueError(f"grid_points must be at least 16, got {grid_points}")
    if not lo < hi:
        raise ValueError(f"Empty interval ({lo}, {hi})")
    x = np.linspace(lo, hi, grid_points)
    gram = _exponential_gram(x)
    refined = _exponential_gram(np.linspace(lo, hi, 2 * grid_points - 1))
    drift = float(np.max(np.abs(refined - gram) / np.abs(refined)))
    if drift > tolerance("quadrature"):
        raise GridTooCoarse(f"Gram changes by {drift:.3e} under refinement of {grid_points} points", residual=drift)

    u = np.vstack([f(x) for f in _CANDIDATES])
    degree = int(np.ceil(0.7 * (hi - lo))) + 32
    second = []
    for f in _CANDIDATES:
        series = Chebyshev.interpolate(f, degree, domain=[lo, hi])
        series = series.trim(np.finfo(float).eps * np.abs(series.coef).max())
        second.append(series.deriv(2)(x))
    # mixed[i, j] = <u_i, u_j''>
    mixed = np.array([[simpson(u[i] * second[j], x=x) for j in range(2)] for i in range(2)])
    assembled = np.linalg.solve(gram, mixed)
    spectral = require(Check("interval_bb_identity", "BB* acts as I on span{e^x, e^-x}",
                             residual_norm(assembled - np.eye(2)), 10 * tolerance("quadrature")))
    logger.debug(f"Interval model on ({lo}, {hi}) with {grid_points} points, BB* residual {spectral.residual:.2e}")
    return DefectModel(
        dim=2,
        gram=gram,
        bb_star_action=np.linalg.solve(gram, 0.5 * (mixed + mixed.T)),
        label=f"N({lo:g},{hi:g})",
        checks=(spectral,),
        ab_star_action=-assembled,
    )


@dataclass(frozen=True)
class SweepReport:
    rows: Tuple[dict, ...]

    @property
    def indices(self) -> Tuple[int, int]:
        dim = self.rows[-1]["dim_at_infinity"] if self.rows else 2
        return dim, dim


def interval_sweep(radii: Sequence[float] = tuple(range(1, 9)), grid_points: int = 256) -> SweepReport:
    """
    Gram diagonals of e^x and e^-x on (-R, R) for growing R, with the log-norm slope of each
    fitted over the radii seen so far. A slope above the `log_slope` tolerance means the
    candidate is not square-integrable at infinity.
    """
    radii = [float(r) for r in radii]
    if sorted(radii) != radii or not radii or radii[0] <= 0:
        raise ValueError("Radii must be positive and increasing")
    log_norms = []
    rows = []
    for i, r in enumerate(radii):
        model = interval_defect_model(grid_points, (-r, r))
        diag = np.diag(model.gram)
        log_norms.append(np.log(diag))
        if i == 0:
            slopes = np.full(2, np.nan)
            dim = 2
        else:
            fit = np.polyfit(radii[: i + 1], np.array(log_norms), 1)
            slopes = fit[0]
            dim = int(np.sum(slopes <= tolerance("log_slope")))
        rows.append({
            "radius": r,
            "norm_sq_exp": float(diag[0]),
            "norm_sq_exp_neg": float(diag[1]),
            "slope_exp": float(slopes[0]),
            "slope_exp_neg": float(slopes[1]),
            "dim_at_infinity": dim,
        })
    return SweepReport(tuple(rows))


# ============ Deficiency spaces and extensions ============

@dataclass(frozen=True)
class ComplexVector2:
    """A complex vector real + i * imag over a real space."""
    real: np.ndarray
    imag: np.ndarray

    def times_i(self) -> "ComplexVector2":
        return ComplexVector2(-self.imag, self.real)

    def scaled(self, factor: complex) -> "ComplexVector2":
        a, b = factor.real, factor.imag
        return ComplexVector2(a * self.real - b * self.imag, a * self.imag + b * self.real)

    def apply(self, matrix: np.ndarray) -> "ComplexVector2":
        return ComplexVector2(matrix @ self.real, matrix @ self.imag)

    def __add__(self, other: "ComplexVector2") -> "ComplexVector2":
        return ComplexVector2(self.real + other.real, self.imag + other.imag)

    def __sub__(self, other: "ComplexVector2") -> "ComplexVector2":
        return ComplexVector2(self.real - other.real, self.imag - other.imag)

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.real, self.imag])


def complex_inner(gram: np.ndarray, f: ComplexVector2, g: ComplexVector2) -> complex:
    """<f, g>, antilinear in f."""
    a, b, c, d = f.real, f.imag, g.real, g.imag
    return complex(a @ gram @ c + b @ gram @ d, a @ gram @ d - b @ gram @ c)


@dataclass(frozen=True)
class DeficiencyIsomorphisms:
    """phi(h) = [h; i B* h] onto the -i eigenspace of L*, psi(h) = [h; -i B* h] onto the +i one."""
    model: DefectModel
    checks: Tuple[Check, ...]

    def phi(self, h) -> ComplexVector2:
        h = as_vector(h, "h")
        b = self.model.b_star_action
        return ComplexVector2(np.concatenate([h, np.zeros_like(h)]), np.concatenate([np.zeros_like(h), b @ h]))

    def psi(self, h) -> ComplexVector2:
        h = as_vector(h, "h")
        b = self.model.b_star_action
        return ComplexVector2(np.concatenate([h, np.zeros_like(h)]), np.concatenate([np.zeros_like(h), -b @ h]))


def deficiency_isomorphisms(model: DefectModel) -> DeficiencyIsomorphisms:
    """Build phi and psi and verify L* phi(h) = -i phi(h), L* psi(h) = +i psi(h) and injectivity."""
    iso = DeficiencyIsomorphisms(model, ())
    if model.dim == 0:
        return iso
    l_star = model.adjoint_l
    tol = 10 * tolerance("quadrature")
    worst_minus, worst_plus = 0.0, 0.0
    images = []
    for j in range(model.dim):
        h = np.eye(model.dim)[:, j]
        phi, psi = iso.phi(h), iso.psi(h)
        worst_minus = max(worst_minus, residual_norm((phi.apply(l_star) - phi.scaled(-1j)).stacked()))
        worst_plus = max(worst_plus, residual_norm((psi.apply(l_star) - psi.scaled(1j)).stacked()))
        images.append(phi.stacked())
    rank = np.linalg.matrix_rank(np.column_stack(images), tol=tolerance("rank"))
    checks = (
        Check("deficiency_minus_i", "L* phi(h) = -i phi(h)", worst_minus, tol),
        Check("deficiency_plus_i", "L* psi(h) = +i psi(h)", worst_plus, tol),
        Check("deficiency_injective", "phi is injective", float(model.dim - rank), 0.5),
    )
    return DeficiencyIsomorphisms(model, checks)


def q_condition_check(model: DefectModel, q) -> Check:
    """|| (I + BB*) - Q*(I + BB*)Q || in the Gram norm of N; Q is admissible iff it vanishes."""
    q = as_matrix(q, "q") if model.dim else np.zeros((0, 0))
    if q.shape != (model.dim, model.dim):
        raise ValueError(f"Q must be {model.dim}x{model.dim}, got {q.shape}")
    space = model.space
    if model.dim == 0:
        return Check("Q_norm_preserving", "I + BB* = Q*(I + BB*)Q", 0.0, 1e-9)
    weight = np.eye(model.dim) + model.bb_star_action
    q_star = adjoint(OperatorBetween(q, space, space)).matrix
    diff = OperatorBetween(weight - q_star @ weight @ q, space, space)
    return Check("Q_norm_preserving", "I + BB* = Q*(I + BB*)Q", operator_norm(diff), 1e-9)


def gram_reflection(gram, w) -> np.ndarray:
    """Householder reflection I - 2 w w^T G / (w^T G w), unitary for the Gram `gram`."""
    gram = as_matrix(gram, "gram")
    w = as_vector(w, "w")
    return np.eye(len(w)) - 2.0 * np.outer(w, w) @ gram / (w @ gram @ w)


def random_gram_unitary(rng: np.random.Generator, gram) -> np.ndarray:
    """L^-T O L^T with G = L L^T and O a random orthogonal matrix."""
    gram = as_matrix(gram, "gram")
    lower = cholesky_spd(gram)
    o, r = np.linalg.qr(rng.standard_normal(gram.shape))
    o = o * np.sign(np.diag(r))
    return np.linalg.solve(lower.T, o @ lower.T)


@dataclass(frozen=True)
class DecomposedElement:
    """f = [x; y] + psi_plus(u) + psi_minus(v) in dom(L*), with v = Q u."""
    x: np.ndarray
    y: np.ndarray
    u: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class ExtensionValue:
    """
    L_Q f split by coordinate system. `regular` = [B y; A x] is in H1 + H2 coordinates;
    `defect` = [i u - i v; B* u - B* v] is in the N + B*N coordinates of the defect model.
    The value of L_Q f is their sum once N and B*N are placed in H1 and H2 (see `combined`).
    """
    regular: np.ndarray
    defect: ComplexVector2
    boundary_form: float

    def combined(self, n_into_first, b_star_n_into_second) -> ComplexVector2:
        """
        regular + defect in H1 + H2 coordinates.

        Args:
            n_into_first: coordinates of the basis of N as columns in H1
            b_star_n_into_second: coordinates of the basis of B*N as columns in H2
        """
        e1 = as_matrix(n_into_first, "n_into_first")
        e2 = as_matrix(b_star_n_into_second, "b_star_n_into_second")
        dim = len(self.defect.real) // 2
        if e1.shape[1] != dim or e2.shape[1] != dim or e1.shape[0] + e2.shape[0] != len(self.regular):
            raise ValueError(f"Embeddings {e1.shape}, {e2.shape} do not map a dim-{dim} model "
                             f"into a space of dim {len(self.regular)}")
        embed = np.block([
            [e1, np.zeros((e1.shape[0], dim))],
            [np.zeros((e2.shape[0], dim)), e2],
        ])
        return ComplexVector2(self.regular, np.zeros_like(self.regular)) + self.defect.apply(embed)


def boundary_form(model: DefectModel, u, v) -> float:
    """
    Im <f, L* f> for f = psi_plus(u) + psi_minus(v), psi_plus(u) = [u; -i B* u] and
    psi_minus(v) = [v; i B* v]. Equals <u, (I+BB*)u> - <v, (I+BB*)v>.
    """
    u, v = as_vector(u, "u"), as_vector(v, "v")
    b = model.b_star_action
    zero = np.zeros(model.dim)
    f = ComplexVector2(np.concatenate([u + v, zero]), np.concatenate([zero, -b @ u + b @ v]))
    l_star_f = f.apply(model.adjoint_l)
    return complex_inner(model.sum_gram, f, l_star_f).imag


def extension_action(pair: SymmetricPair, model: DefectModel, q, element: DecomposedElement) -> ExtensionValue:
    """
    L_Q f = [B y + i u - i v; A x + B* u - B* v] for f = [x; y] + psi_plus(u) + psi_minus(v).

    Raises:
        QNotAdmissible: Q is not norm preserving for I + BB*
        DecompositionMismatch: v differs from Q u
    """
    admissible = q_condition_check(model, q)
    if not admissible.passed:
        raise QNotAdmissible(f"Q fails the norm condition, residual {admissible.residual:.3e}",
                             residual=admissible.residual)
    q = as_matrix(q, "q") if model.dim else np.zeros((0, 0))
    x, y = as_vector(element.x, "x"), as_vector(element.y, "y")
    u, v = as_vector(element.u, "u"), as_vector(element.v, "v")
    mismatch = residual_norm(v - q @ u) if model.dim else 0.0
    if mismatch > 1e-9 * max(residual_norm(u), 1.0):
        raise DecompositionMismatch(f"v - Q u has norm {mismatch:.3e}", residual=mismatch)
    regular = np.concatenate([pair.b.matrix @ y, pair.a.matrix @ x])
    b = model.b_star_action
    zero = np.zeros(model.dim)
    defect = ComplexVector2(np.concatenate([zero, b @ (u - v)]), np.concatenate([u - v, zero]))
    return ExtensionValue(regular, defect, boundary_form(model, u, v))


@dataclass(frozen=True)
class CBlockReport:
    residual: float
    pseudo_inverse: bool


def c_block_relation_check(model: DefectModel, q, c11, c12, c21, c22, strict: bool = False) -> CBlockReport:
    """Residual of C22 C12^-1 (C11 - Q) + C12^-1 (C11 - Q) Q - C21; C12 is pseudo-inverted when singular."""
    q = as_matrix(q, "q")
    c11, c12, c21, c22 = (as_matrix(c, name) for c, name in zip((c11, c12, c21, c22), ("c11", "c12", "c21", "c22")))
    if q.shape != (model.dim, model.dim) or any(c.shape != q.shape for c in (c11, c12, c21, c22)):
        raise ValueError("Q and the C blocks must all be dim x dim")
    singular = np.linalg.matrix_rank(c12, tol=tolerance("rank") * max(np.abs(c12).max(), 1.0)) < model.dim
    if singular:
        if strict:
            raise SingularC12("C12 is singular")
        logger.warning("C12 singular, relation evaluated with the pseudo-inverse")
    c12_inv = np.linalg.pinv(c12) if singular else np.linalg.inv(c12)
    shifted = c11 - q
    residual = residual_norm(c22 @ c12_inv @ shifted + c12_inv @ shifted @ q - c21)
    return CBlockReport(residual, bool(singular))
