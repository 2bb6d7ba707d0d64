# -*- coding: utf-8 -*-
"""
@author:XuMing(xuming624@qq.com)
@description: Config for opduality
Centralized numerical tolerances and solver limits, overridable by environment variables.
"""
import math
import os
from typing import Dict

# ==================== Tolerances ====================
# pivot threshold of the Cholesky factorization, relative to the largest diagonal entry
TOL_SPD = float(os.getenv("OPDUALITY_TOL_SPD", 1e-12))
# relative eigenvalue threshold for kernels, ranks and pseudo-inverses
TOL_RANK = float(os.getenv("OPDUALITY_TOL_RANK", 1e-9))
# Jacobi stopping criterion: off-diagonal norm relative to the Frobenius norm
TOL_JACOBI = float(os.getenv("OPDUALITY_TOL_JACOBI", 1e-13))
# conjugate gradient residual relative to the right hand side
TOL_CG = float(os.getenv("OPDUALITY_TOL_CG", 1e-10))
# symmetry of gram @ a as a plain matrix, relative
TOL_SELFADJOINT = float(os.getenv("OPDUALITY_TOL_SELFADJOINT", 1e-10))
# operator identities (projection, Stone, pair compatibility)
TOL_IDENTITY = float(os.getenv("OPDUALITY_TOL_IDENTITY", 1e-10))
# |lambda + 1| threshold of the defect eigenproblem
TOL_KERNEL_EIGEN = float(os.getenv("OPDUALITY_TOL_KERNEL_EIGEN", 1e-8))
# unitarity and intertwining of the reflection input
TOL_INTERTWINING = float(os.getenv("OPDUALITY_TOL_INTERTWINING", 1e-10))
# relative change of quadrature Gram entries under grid refinement
TOL_QUADRATURE = float(os.getenv("OPDUALITY_TOL_QUADRATURE", 1e-4))
# log-norm slope above which a candidate is excluded at infinity
TOL_LOG_SLOPE = float(os.getenv("OPDUALITY_TOL_LOG_SLOPE", 0.1))

# ==================== Solver Configuration ====================
JACOBI_MAX_SWEEPS = int(os.getenv("OPDUALITY_JACOBI_MAX_SWEEPS", 100))
# above this dimension the generalized eigenproblem goes to LAPACK
JACOBI_MAX_DIM = int(os.getenv("OPDUALITY_JACOBI_MAX_DIM", 160))
DENSE_SOLVE_MAX_DIM = int(os.getenv("OPDUALITY_DENSE_SOLVE_MAX_DIM", 200))
CG_MAX_ITER_FACTOR = int(os.getenv("OPDUALITY_CG_MAX_ITER_FACTOR", 10))
CESARO_STEPS = int(os.getenv("OPDUALITY_CESARO_STEPS", 10000))

# ==================== Suite Configuration ====================
DEFAULT_SEED = int(os.getenv("OPDUALITY_SEED", 42))
OUTPUT_DIR = os.getenv("OPDUALITY_OUTPUT_DIR", "./out")
MAX_WORKERS = int(os.getenv("OPDUALITY_MAX_WORKERS", 4))

# ==================== Logging Configuration ====================
LOG_LEVEL = os.getenv("OPDUALITY_LOG_LEVEL", "INFO").upper()

TOLERANCES: Dict[str, float] = {
    "spd": TOL_SPD,
    "rank": TOL_RANK,
    "jacobi": TOL_JACOBI,
    "cg": TOL_CG,
    "selfadjoint": TOL_SELFADJOINT,
    "identity": TOL_IDENTITY,
    "kernel_eigen": TOL_KERNEL_EIGEN,
    "intertwining": TOL_INTERTWINING,
    "quadrature": TOL_QUADRATURE,
    "log_slope": TOL_LOG_SLOPE,
}
_DEFAULTS = dict(TOLERANCES)


def tolerance(name: str) -> float:
    """Active value of a named tolerance."""
    try:
        return TOLERANCES[name]
    except KeyError:
        raise KeyError(f"Unknown tolerance '{name}', expected one of {sorted(TOLERANCES)}") from None


def set_tolerance(name: str, value: float) -> float:
    """
    Override a named tolerance for the rest of the process.

    Args:
        name: one of the keys of TOLERANCES
        value: positive finite float
    Returns:
        the previous value
    """
    if name not in TOLERANCES:
        raise KeyError(f"Unknown tolerance '{name}', expected one of {sorted(TOLERANCES)}")
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise ValueError(f"Tolerance '{name}' must be positive and finite, got {value}")
    previous = TOLERANCES[name]
    TOLERANCES[name] = value
    return previous


def reset_tolerances():
    """Restore every tolerance to its environment/default value."""
    TOLERANCES.clear()
    TOLERANCES.update(_DEFAULTS)
