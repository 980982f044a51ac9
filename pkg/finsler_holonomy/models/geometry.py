"""Geometry records: tangent samples, indicatrix samples, connection data and reports."""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field


@dataclass(frozen=True)
class TangentSample:
    """A point (x, y) of the slit tangent bundle."""

    x: np.ndarray
    y: np.ndarray

    @classmethod
    def of(cls, x, y) -> "TangentSample":
        return cls(np.asarray(x, dtype=float), np.asarray(y, dtype=float))

    @property
    def dim(self) -> int:
        return int(self.x.shape[0])


@dataclass(frozen=True)
class IndicatrixSampleSet:
    """Seeded points on the positive indicatrix F(x, .) = 1."""

    x: np.ndarray
    points: np.ndarray
    seed: int
    margin: float = 0.0
    acceptance_rate: float = 1.0

    @property
    def count(self) -> int:
        return int(self.points.shape[0])

    def samples(self) -> List[TangentSample]:
        return [TangentSample(self.x, p) for p in self.points]

    def scaled(self, factor: float) -> "IndicatrixSampleSet":
        """Same directions, radially rescaled (leaves the indicatrix)."""
        return IndicatrixSampleSet(
            x=self.x,
            points=self.points * factor,
            seed=self.seed,
            margin=self.margin,
            acceptance_rate=self.acceptance_rate,
        )


@dataclass
class ConnectionData:
    """Canonical objects at one tangent sample."""

    sample: TangentSample
    g: np.ndarray
    g_inv: np.ndarray
    G: np.ndarray
    Gamma: np.ndarray
    R: np.ndarray  # R[k, i, j] = R^k_ij
    raw_asymmetry: float = 0.0
    tangency_defect: float = 0.0
    extras: dict = field(default_factory=dict)


class HomogeneityReport(BaseModel):
    """Deviation from degree-two homogeneity and the Euler identity."""

    lambdas: List[float]
    max_relative_deviation: float
    euler_deviation: float
    passed: bool


class AxiomReport(BaseModel):
    """Minkowski-functional axioms checked over a sample set."""

    samples_checked: int
    max_homogeneity_deviation: float
    max_euler_deviation: float
    max_asymmetry: float
    min_sigma_ratio: float
    positive_definite_claim: bool
    positive_definite_violations: int = 0
    passed: bool


class CurvatureFitReport(BaseModel):
    """Least-squares fit of R against the constant-curvature pattern."""

    c_estimate: float
    residual: float
    samples_used: int
    per_sample_spread: float = 0.0
    sign_convention: float = -1.0


class RiemannianPointReport(BaseModel):
    """Whether g_y is independent of y at a base point."""

    is_semi_riemannian: bool
    deviation: float
    tolerance: float
    samples_used: int


class ConnectionSummary(BaseModel):
    """Connection objects at a representative sample, for reports."""

    y: List[float]
    spray: List[float]
    max_abs_gamma: float
    max_abs_curvature: float
    raw_asymmetry: float
    tangency_defect: float
    fundamental_tensor: List[List[float]] = Field(default_factory=list)
    note: Optional[str] = None
