"""Heisenberg group H3 in its global chart and the left-invariant Berwald-Moor functional."""

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..errors import DomainError


@dataclass(frozen=True)
class HeisenbergPoint:
    x1: float
    x2: float
    x3: float

    @classmethod
    def of(cls, values: Iterable[float]) -> "HeisenbergPoint":
        x1, x2, x3 = (float(v) for v in values)
        return cls(x1, x2, x3)

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3])


IDENTITY = HeisenbergPoint(0.0, 0.0, 0.0)


def heisenberg_multiply(p: HeisenbergPoint, q: HeisenbergPoint) -> HeisenbergPoint:
    return HeisenbergPoint(p.x1 + q.x1, p.x2 + q.x2 + p.x1 * q.x3, p.x3 + q.x3)


def heisenberg_inverse(p: HeisenbergPoint) -> HeisenbergPoint:
    return HeisenbergPoint(-p.x1, p.x1 * p.x3 - p.x2, -p.x3)


def left_translation_differential(p: HeisenbergPoint, y) -> np.ndarray:
    """Differential of x -> p.x, the same at every x: (y1, y2 + p1 y3, y3)."""
    y = np.asarray(y, dtype=float)
    out = y.copy()
    out[..., 1] = y[..., 1] + p.x1 * y[..., 2]
    return out


def berwald_moor_functional(a) -> float:
    """F0(a) = (a1 a2 a3)^(2/3) on the positive octant."""
    a = np.asarray(a, dtype=float)
    if np.any(a <= 0):
        raise DomainError(f"Berwald-Moor functional needs a positive vector, got {a.tolist()}", y=a)
    return float(np.prod(a) ** (2.0 / 3.0))


def heisenberg_metric(x, y) -> float:
    """F(x, y) = (y1 (y2 - x1 y3) y3)^(2/3), i.e. F0 of y carried back to the identity."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a = left_translation_differential(heisenberg_inverse(HeisenbergPoint.of(x)), y)
    if np.any(a <= 0):
        raise DomainError(
            f"y={y.tolist()} is outside the Berwald-Moor cone at x={x.tolist()}", x=x, y=y
        )
    return berwald_moor_functional(a)
