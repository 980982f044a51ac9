"""Closed-form curvature fields of the Heisenberg Berwald-Moor kernel and the A^{k,m} family.

With s = y2 - x1 y3 (positive on the cone) and d = -s:

    r_x(1,2) = 1/4 (5 y1^2 y3^2 / d^3, y1 y3^2 (3 x1 y3 + y2) / s^3, 4 y1 y3^3 / s^3)
    r_x(1,3) = 1/4 (y1^2 y3 (6 x1 y3 - 11 y2) / d^3,
                    4 x1 y1 y3^2 (2 x1 y3 - 3 y2) / s^3,
                    y1 y3^2 (7 x1 y3 - 11 y2) / s^3)
    r_x(2,3) = 1/4 (4 y1^3 y3 / d^3, y1^2 y3 (6 x1 y3 - y2) / s^3, 5 y1^2 y3^2 / s^3)

At x = 0 these are quarter multiples of A-fields:
r_0(1,2) = 1/4 A^{1,2}(-5,1,4), r_0(1,3) = 1/4 A^{1,1}(11,0,-11), r_0(2,3) = 1/4 A^{2,1}(-4,-1,5).
"""

from typing import Optional, Sequence, Tuple

import jax.numpy as jnp
import numpy as np

from ..algebra.fields import IndicatrixField, traceable_field
from ..errors import DomainError, ValidationError

PAIRS = ((1, 2), (1, 3), (2, 3))

# (grade, coefficients) with r_0(i, j) = 1/4 A^{grade}(coefficients)
GENERATOR_FORMS = {
    (1, 2): ((1, 2), (-5.0, 1.0, 4.0)),
    (1, 3): ((1, 1), (11.0, 0.0, -11.0)),
    (2, 3): ((2, 1), (-4.0, -1.0, 5.0)),
}


def _components(i: int, j: int, x1, y, xp):
    y1, y2, y3 = y[0], y[1], y[2]
    s = y2 - x1 * y3
    d = -s
    if (i, j) == (1, 2):
        parts = (
            5 * y1**2 * y3**2 / d**3,
            y1 * y3**2 * (3 * x1 * y3 + y2) / s**3,
            4 * y1 * y3**3 / s**3,
        )
    elif (i, j) == (1, 3):
        parts = (
            y1**2 * y3 * (6 * x1 * y3 - 11 * y2) / d**3,
            4 * y1 * y3**2 * x1 * (2 * x1 * y3 - 3 * y2) / s**3,
            y1 * y3**2 * (7 * x1 * y3 - 11 * y2) / s**3,
        )
    else:
        parts = (
            4 * y1**3 * y3 / d**3,
            y1**2 * y3 * (6 * x1 * y3 - y2) / s**3,
            5 * y1**2 * y3**2 / s**3,
        )
    return 0.25 * xp.stack(parts)


def _check_pair(i: int, j: int) -> None:
    if (i, j) not in PAIRS:
        raise ValidationError(f"Closed forms exist for pairs {PAIRS}, got ({i}, {j})")


def closed_form_r(
    i: int, j: int, x, y, sign_flip: Optional[Tuple[int, int]] = None
) -> np.ndarray:
    """r_x(e_i, e_j)(y) from the closed forms (1-based i < j).

    ``sign_flip`` negates one formula; used to check that verification notices.
    """
    _check_pair(i, j)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if y[0] <= 0 or y[2] <= 0 or y[1] - x[0] * y[2] <= 0:
        raise DomainError(f"y={y.tolist()} is outside the Berwald-Moor cone at x={x.tolist()}", x=x, y=y)
    value = np.asarray(_components(i, j, x[0], y, np), dtype=float)
    if sign_flip is not None and tuple(sign_flip) == (i, j):
        value = -value
    return value


def closed_form_field(i: int, j: int, x=None) -> IndicatrixField:
    """Traceable r_x(e_i, e_j) over the base point x."""
    _check_pair(i, j)
    x = np.zeros(3) if x is None else np.asarray(x, dtype=float)
    x1 = float(x[0])
    return traceable_field(lambda y: _components(i, j, x1, y, jnp), x, f"r({i},{j})")


def y_monomial(k: int, m: int, y):
    """Y^{k,m} = y1^k y3^m / y2^(k+m-1)."""
    return y[..., 0] ** k * y[..., 2] ** m / y[..., 1] ** (k + m - 1)


def _akm(k: int, m: int, a, y, xp):
    return xp.stack(
        [a[0] * y_monomial(k + 1, m, y), a[1] * y_monomial(k, m, y), a[2] * y_monomial(k, m + 1, y)],
        axis=-1,
    )


def akm_field(k: int, m: int, a: Sequence[float], y) -> np.ndarray:
    """A^{k,m}(a)(y) = (a1 Y^{k+1,m}, a2 Y^{k,m}, a3 Y^{k,m+1}); degree one in y."""
    if k < 0 or m < 0:
        raise ValidationError(f"Grade must be non-negative, got ({k}, {m})")
    y = np.asarray(y, dtype=float)
    if np.any(y[..., 1] == 0):
        raise DomainError("A-fields are undefined where y2 = 0", y=y)
    return _akm(k, m, np.asarray(a, dtype=float), y, np)


def akm_vector_field(k: int, m: int, a: Sequence[float], base_x=None) -> IndicatrixField:
    coefficients = tuple(float(c) for c in a)
    base = np.zeros(3) if base_x is None else base_x
    label = "A^{%d,%d}(%s)" % (k, m, ",".join(f"{c:g}" for c in coefficients))
    return traceable_field(lambda y: _akm(k, m, coefficients, y, jnp), base, label)


def monomial_exponents(k: int, m: int) -> np.ndarray:
    """Exponent vectors of the three components of A^{k,m} in (y1, y2, y3)."""
    return np.array(
        [
            [k + 1, -k - m, m],
            [k, 1 - k - m, m],
            [k, -k - m, m + 1],
        ],
        dtype=float,
    )
