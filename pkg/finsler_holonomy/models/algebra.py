"""Curvature algebra records."""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field


@dataclass
class TabulatedField:
    """Field values known only at sample points (commutator-loop estimates)."""

    base_x: np.ndarray
    points: np.ndarray
    values: np.ndarray
    label: str


class DepthSummary(BaseModel):
    """Fields added at one bracket depth."""

    depth: int
    labels: List[str] = Field(default_factory=list)
    rank_increasing: List[str] = Field(default_factory=list)
    rank: int = 0
    max_tangency_defect: float = 0.0
    tangent: bool = True


class AlgebraReport(BaseModel):
    """Generated curvature algebra and its numerical dimension."""

    generators: List[str]
    depth: int
    fields_by_depth: List[DepthSummary]
    singular_values: List[float]
    rank: int
    tol_rank: float
    samples_used: int
    tol_tangency: float = 1e-5
    tangency_closed: bool = True
    evaluation_matrix: Optional[List[List[float]]] = Field(default=None, exclude=True)

    @property
    def rank_by_depth(self) -> List[int]:
        return [d.rank for d in self.fields_by_depth]


class EvidenceRow(BaseModel):
    depth: int
    fields: int
    rank: int


class EvidenceTable(BaseModel):
    """Rank per depth for the Heisenberg curvature algebra."""

    rows: List[EvidenceRow]
    samples: int
    seed: int
    tol_rank: float
    strictly_increasing: bool


class OperatorAlgebraReport(BaseModel):
    """Matrix Lie algebra spanned by curvature operators and their commutators."""

    generators: List[str]
    reference_y: List[float]
    rank_by_depth: List[int]
    singular_values: List[float]
    rank: int
    tol_rank: float
