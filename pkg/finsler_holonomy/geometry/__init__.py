"""Fundamental tensor, derivative oracle and canonical connection."""

from .connection import (
    CURVATURE_SIGN_CONVENTION,
    connection_data,
    connection_summary,
    constant_curvature_fit,
    constant_curvature_pattern,
    curvature,
    nonlinear_connection,
    riemannian_point_test,
    spray,
)
from .core import (
    evaluate_metric,
    fundamental_tensor,
    indicatrix_project,
    sample_indicatrix,
    validate_homogeneity,
    validate_minkowski_axioms,
)
from .oracle import MAX_ORDER, DerivativeOracle, derivative_oracle

__all__ = [
    "CURVATURE_SIGN_CONVENTION",
    "DerivativeOracle",
    "MAX_ORDER",
    "connection_data",
    "connection_summary",
    "constant_curvature_fit",
    "constant_curvature_pattern",
    "curvature",
    "derivative_oracle",
    "evaluate_metric",
    "fundamental_tensor",
    "indicatrix_project",
    "nonlinear_connection",
    "riemannian_point_test",
    "sample_indicatrix",
    "spray",
    "validate_homogeneity",
    "validate_minkowski_axioms",
]
