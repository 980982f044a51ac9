"""Bracket coefficients of A-fields and the linear systems they produce."""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np
import sympy

from ..algebra.fields import IndicatrixField, lie_bracket
from ..errors import ConsistencyError
from .closed_forms import akm_field, akm_vector_field, monomial_exponents, y_monomial

logger = logging.getLogger(__name__)

GENERATOR_GRADE = (1, 1)
GENERATOR_COEFFICIENTS = (1.0, 0.0, -1.0)


@dataclass
class BracketCoefficients:
    grade: Tuple[int, int]
    c: np.ndarray
    max_error: float = 0.0


def bracket_coefficients(k: int, m: int, a: Sequence[float]) -> Tuple[Tuple[int, int], np.ndarray]:
    """[A^{1,1}(1,0,-1), A^{k,m}(a)] = A^{k+1,m+1}(c), c in closed form."""
    a1, a2, a3 = (float(v) for v in a)
    n = k - m
    c = np.array(
        [
            (n - 1) * a1 + 2 * a2 - a3,
            n * a2,
            a1 - 2 * a2 + (n + 1) * a3,
        ]
    )
    return (k + 1, m + 1), c


def general_bracket_coefficients(
    p: int, q: int, b: Sequence[float], k: int, m: int, a: Sequence[float]
) -> Tuple[Tuple[int, int], np.ndarray]:
    """[A^{p,q}(b), A^{k,m}(a)] = A^{k+p,m+q}(c) with c_i = a_i (e_i . b) - b_i (f_i . a).

    e_i and f_i are the monomial exponent vectors of A^{k,m} and A^{p,q}.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    e = monomial_exponents(k, m)
    f = monomial_exponents(p, q)
    return (k + p, m + q), a * (e @ b) - b * (f @ a)


def cone_points(count: int, seed: int, low: float = 0.5, high: float = 2.0) -> np.ndarray:
    """Points of the positive octant (the cone at the identity)."""
    rng = np.random.default_rng(seed)
    return rng.uniform(low, high, size=(count, 3))


def _relative_gap(actual: np.ndarray, expected: np.ndarray, scale: float) -> float:
    return float(np.max(np.abs(actual - expected)) / max(scale, np.finfo(float).tiny))


def bracket_coefficient_check(
    k: int,
    m: int,
    a: Sequence[float],
    samples: int = 20,
    seed: int = 11,
    tol: float = 1e-8,
) -> BracketCoefficients:
    """Closed-form coefficients, confirmed by a numerical bracket on cone samples."""
    grade, c = bracket_coefficients(k, m, a)
    generator = akm_vector_field(*GENERATOR_GRADE, GENERATOR_COEFFICIENTS)
    target = akm_vector_field(k, m, a)
    points = cone_points(samples, seed)
    numeric = lie_bracket(generator, target).values(points)
    expected = akm_field(grade[0], grade[1], c, points)
    scale = max(
        float(np.max(np.abs(generator.jacobian(points)))) * float(np.max(np.abs(target.values(points)))),
        float(np.max(np.abs(expected))),
    )
    error = _relative_gap(numeric, expected, scale)
    if error > tol:
        raise ConsistencyError(
            f"Bracket with A^{{1,1}}(1,0,-1) on A^{{{k},{m}}}({list(a)}) deviates by {error:.3e}",
            check="bracket_coefficients",
            max_error=error,
        )
    return BracketCoefficients(grade=grade, c=c, max_error=error)


def grade_fit(
    field: Union[IndicatrixField, np.ndarray], points: np.ndarray, grade: Tuple[int, int]
) -> Tuple[np.ndarray, float]:
    """Least-squares coefficients of a single A^{k,m} form and the relative residual."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    values = field.values(points) if isinstance(field, IndicatrixField) else np.asarray(field, dtype=float)
    k, m = grade
    basis = np.stack(
        [y_monomial(k + 1, m, points), y_monomial(k, m, points), y_monomial(k, m + 1, points)],
        axis=-1,
    )
    coefficients = np.sum(values * basis, axis=0) / np.sum(basis * basis, axis=0)
    fitted = basis * coefficients[None, :]
    norm = float(np.linalg.norm(values))
    residual = float(np.linalg.norm(values - fitted)) / norm if norm > 0 else 0.0
    return coefficients, residual


def second_system_matrix(k: float) -> np.ndarray:
    """Coefficient matrix of a -> c for [A^{1,2}(-5,1,4), A^{k,k}(a)]."""
    return np.array(
        [
            [5 - 3 * k, -15, 10],
            [-1, 3 - 3 * k, -2],
            [-4, 12, -3 * k - 8],
        ],
        dtype=float,
    )


def second_system_determinant(k: float) -> float:
    return float(np.linalg.det(second_system_matrix(k)))


def symbolic_second_system_determinant() -> sympy.Expr:
    """Determinant as a polynomial in k, built from the general bracket rule."""
    k = sympy.Symbol("k")
    b = (-5, 1, 4)
    e = sympy.Matrix([[k + 1, -2 * k, k], [k, 1 - 2 * k, k], [k, -2 * k, k + 1]])
    f = sympy.Matrix(monomial_exponents(1, 2).astype(int).tolist())
    rows = []
    for i in range(3):
        row = [-b[i] * f[i, j] for j in range(3)]
        row[i] += sum(e[i, j] * b[j] for j in range(3))
        rows.append(row)
    return sympy.factor(sympy.Matrix(rows).det())
