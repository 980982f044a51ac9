"""Indicatrix vector fields, Lie brackets and the curvature algebra."""

from .fields import (
    CurvatureEvaluator,
    IndicatrixField,
    constant_curvature_field,
    curvature_field,
    curvature_generators,
    fd_jacobian,
    jacobian_consistency,
    lie_bracket,
    linear_field,
    rotation_generator,
    tangency_defects,
    traceable_field,
    wedge,
)
from .generation import (
    dimension_estimate,
    equilibrate,
    evaluation_matrix,
    generate_algebra,
    numerical_rank,
    required_samples,
    surface_algebra_rank,
)
from .operators import curvature_operator, operator_algebra_rank

__all__ = [
    "CurvatureEvaluator",
    "IndicatrixField",
    "constant_curvature_field",
    "curvature_field",
    "curvature_generators",
    "curvature_operator",
    "dimension_estimate",
    "equilibrate",
    "evaluation_matrix",
    "fd_jacobian",
    "generate_algebra",
    "jacobian_consistency",
    "lie_bracket",
    "linear_field",
    "numerical_rank",
    "operator_algebra_rank",
    "required_samples",
    "rotation_generator",
    "surface_algebra_rank",
    "tangency_defects",
    "traceable_field",
    "wedge",
]
