# -*- coding: utf-8 -*-
"""
opduality: Operator Duality on Finite Models

Characteristic projections of operator graphs, the duality operator of a pair of
Hilbert norms, semibounded extensions, symmetric pairs with their defect spaces, and
graph Laplacians of resistor networks, all checked numerically on finite matrices.
"""

__version__ = "0.1.0"
__author__ = "XuMing"
__email__ = "xuming624@qq.com"
__license__ = "Apache-2.0"

from opduality.base import (
    Check,
    OpDualityError,
    ParseError,
    VerificationError,
    all_passed,
    failed,
)

from opduality.linalg import (
    SparseSymmetric,
    cholesky_spd,
    jacobi_eigh,
    sym_eigen,
    solve_spd,
)

from opduality.hilbert_pair import (
    WeightedSpace,
    OperatorBetween,
    DirectSum,
    CommonDomain,
    adjoint,
    graph_subspace,
    v_flip,
)

from opduality.charproj import (
    BlockProjection,
    char_projection,
    char_projection_of_adjoint,
    schur_complements,
    analyze_graph,
)

from opduality.duality import (
    DiscreteMeasureSpace,
    duality_operator,
    spectral_measure,
    partial_isometry_k,
    reflection_hat,
)

from opduality.extensions import (
    SemiboundedForm,
    RestrictedOperator,
    friedrichs_extension,
    krein_membership,
    form_correspondence,
)

from opduality.sympair import (
    SymmetricPair,
    DefectModel,
    build_l,
    defect_space,
    interval_defect_model,
    deficiency_isomorphisms,
    extension_action,
)

from opduality.network import (
    Network,
    EnergySpace,
    laplacian_apply,
    energy_inner,
    dipole,
    kl_pair,
    effective_resistance,
)

from opduality.exhaustion import (
    ExhaustionFamily,
    exhaustion_harmonics,
    make_family,
)

from opduality.formats import (
    parse_network,
    parse_matrix,
    parse_pair,
)

from opduality.log import (
    logger,
    set_log_level,
    add_file_logger,
    suite_context,
    log_checks,
)


__all__ = [
    # Version
    "__version__",
    "__author__",
    "__email__",

    # Results and errors
    "Check",
    "OpDualityError",
    "ParseError",
    "VerificationError",
    "all_passed",
    "failed",

    # Numeric kernel
    "SparseSymmetric",
    "cholesky_spd",
    "jacobi_eigh",
    "sym_eigen",
    "solve_spd",

    # Hilbert pairs
    "WeightedSpace",
    "OperatorBetween",
    "DirectSum",
    "CommonDomain",
    "adjoint",
    "graph_subspace",
    "v_flip",

    # Characteristic projections
    "BlockProjection",
    "char_projection",
    "char_projection_of_adjoint",
    "schur_complements",
    "analyze_graph",

    # Duality
    "DiscreteMeasureSpace",
    "duality_operator",
    "spectral_measure",
    "partial_isometry_k",
    "reflection_hat",
    "SemiboundedForm",
    "RestrictedOperator",
    "friedrichs_extension",
    "krein_membership",
    "form_correspondence",

    # Symmetric pairs
    "SymmetricPair",
    "DefectModel",
    "build_l",
    "defect_space",
    "interval_defect_model",
    "deficiency_isomorphisms",
    "extension_action",

    # Networks
    "Network",
    "EnergySpace",
    "laplacian_apply",
    "energy_inner",
    "dipole",
    "kl_pair",
    "effective_resistance",
    "ExhaustionFamily",
    "exhaustion_harmonics",
    "make_family",

    # Formats
    "parse_network",
    "parse_matrix",
    "parse_pair",

    # Logger
    "logger",
    "set_log_level",
    "add_file_logger",
    "suite_context",
    "log_checks",
]
