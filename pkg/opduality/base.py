# -*- coding: utf-8 -*-
"""
@author:XuMing(xuming624@qq.com)
@description: Base classes and utilities for opduality
"""
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional

import numpy as np


# ============ Errors ============

class OpDualityError(Exception):
    """Base class of every domain error; `residual` is set when a measured quantity caused it."""

    def __init__(self, message: str = "", residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual


class NotSPD(OpDualityError):
    """Matrix is not symmetric positive definite."""


class NotSelfadjoint(OpDualityError):
    """Operator is not selfadjoint with respect to the given Gram."""


class NoConvergence(OpDualityError):
    """Iterative solver ran out of iterations."""


class InconsistentRHS(OpDualityError):
    """Right hand side is not orthogonal to the kernel."""


class NotDense(OpDualityError):
    """Common domain does not span the first space."""


class NotClosable(OpDualityError):
    """A null direction of the first norm has a non-zero image in the second space."""


class NotUnitary(OpDualityError):
    pass


class NotIntertwining(OpDualityError):
    pass


class NotSemibounded(OpDualityError):
    """Operator or form is not bounded below by the identity."""


class SingularBlock(OpDualityError):
    pass


class NotAGraph(OpDualityError):
    """Subspace contains vectors of the form (0, psi) with psi != 0."""


class PairIncompatible(OpDualityError):
    pass


class GridTooCoarse(OpDualityError):
    pass


class QNotAdmissible(OpDualityError):
    pass


class DecompositionMismatch(OpDualityError):
    pass


class SingularC12(OpDualityError):
    pass


class SameAsBase(OpDualityError):
    pass


class VertexMissing(OpDualityError):
    pass


class NotConnected(OpDualityError):
    pass


class NonpositiveConductance(OpDualityError):
    pass


class VerificationError(OpDualityError):
    """A post-condition identity exceeded its tolerance."""


class ParseError(OpDualityError):
    """Malformed input file, with 1-based line and column."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


# ============ Check records ============

@dataclass(frozen=True)
class Check:
    """
    One verified identity: its name, a short anchor text describing the statement,
    the measured residual and the tolerance it is held to.
    """
    name: str
    anchor: str
    residual: float
    tolerance: float

    def __post_init__(self):
        # numpy scalars in, builtins out
        object.__setattr__(self, "residual", float(self.residual))
        object.__setattr__(self, "tolerance", float(self.tolerance))

    @property
    def passed(self) -> bool:
        return bool(math.isfinite(self.residual) and self.residual <= self.tolerance)

    def to_dict(self) -> dict:
        return {
            "identity": self.name,
            "anchor": self.anchor,
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "pass": self.passed,
        }


def all_passed(checks: Iterable[Check]) -> bool:
    return all(c.passed for c in checks)


def failed(checks: Iterable[Check]) -> List[Check]:
    return [c for c in checks if not c.passed]


def require(check: Check) -> Check:
    """Raise VerificationError when a post-condition check fails."""
    if not check.passed:
        raise VerificationError(
            f"{check.name}: residual {check.residual:.3e} exceeds {check.tolerance:.1e}",
            residual=check.residual,
        )
    return check


# ============ Utilities ============

def as_matrix(x, name: str = "matrix") -> np.ndarray:
    """Copy input into a finite 2-d float array."""
    m = np.array(x, dtype=float, copy=True)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    elif m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def as_vector(x, name: str = "vector") -> np.ndarray:
    v = np.array(x, dtype=float, copy=True).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    return v


def residual_norm(m) -> float:
    """Frobenius norm, 0 for empty arrays."""
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m))


def relative_residual(value: float, reference: float) -> float:
    return abs(value - reference) / max(abs(reference), 1.0)


def random_spd(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    """Random SPD matrix B^T B + I."""
    b = scale * rng.standard_normal((dim, dim))
    return b.T @ b + np.eye(dim)


def random_gram(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Random well-conditioned SPD Gram matrix."""
    b = rng.standard_normal((dim, dim)) / np.sqrt(max(dim, 1))
    return b.T @ b + np.eye(dim)
