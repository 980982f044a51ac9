"""Heisenberg group with the left-invariant Berwald-Moor kernel: closed forms and checks."""

from .brackets import (
    BracketCoefficients,
    bracket_coefficient_check,
    bracket_coefficients,
    general_bracket_coefficients,
    cone_points,
    grade_fit,
    second_system_determinant,
    second_system_matrix,
    symbolic_second_system_determinant,
)
from .closed_forms import (
    GENERATOR_FORMS,
    PAIRS,
    akm_field,
    akm_vector_field,
    closed_form_field,
    closed_form_r,
    y_monomial,
)
from .evidence import infinite_dim_evidence
from .group import (
    IDENTITY,
    HeisenbergPoint,
    berwald_moor_functional,
    heisenberg_inverse,
    heisenberg_metric,
    heisenberg_multiply,
    left_translation_differential,
)
from .verification import (
    AppendixCheck,
    AppendixVerifier,
    create_verification_report,
    first_failure,
)

__all__ = [
    "AppendixCheck",
    "AppendixVerifier",
    "BracketCoefficients",
    "GENERATOR_FORMS",
    "HeisenbergPoint",
    "IDENTITY",
    "PAIRS",
    "akm_field",
    "akm_vector_field",
    "berwald_moor_functional",
    "bracket_coefficient_check",
    "bracket_coefficients",
    "cone_points",
    "closed_form_field",
    "closed_form_r",
    "create_verification_report",
    "first_failure",
    "general_bracket_coefficients",
    "grade_fit",
    "heisenberg_inverse",
    "heisenberg_metric",
    "heisenberg_multiply",
    "infinite_dim_evidence",
    "left_translation_differential",
    "second_system_determinant",
    "second_system_matrix",
    "symbolic_second_system_determinant",
    "y_monomial",
]
