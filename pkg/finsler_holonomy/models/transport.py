"""Curve specifications and holonomy records."""

from dataclasses import dataclass
from typing import List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, Field

from .geometry import IndicatrixSampleSet


class SegmentPiece(BaseModel):
    """Straight chart segment from start to end."""

    kind: Literal["segment"] = "segment"
    start: List[float]
    end: List[float]


class ArcPiece(BaseModel):
    """Circular chart arc center + radius (cos(phi) u + sin(phi) v), phi from phi0 to phi1."""

    kind: Literal["arc"] = "arc"
    center: List[float]
    u: List[float]
    v: List[float]
    radius: float = 1.0
    phi0: float = 0.0
    phi1: float = 1.0


CurvePiece = Union[SegmentPiece, ArcPiece]


class CurveSpec(BaseModel):
    """Piecewise-C1 curve; each piece is integrated with the same number of steps."""

    name: str = "curve"
    pieces: List[CurvePiece] = Field(default_factory=list)


@dataclass
class HolonomyElement:
    """Tabulated indicatrix map induced by parallel transport around a loop."""

    base_x: np.ndarray
    domain: IndicatrixSampleSet
    images: np.ndarray
    loop: CurveSpec
    step_count: int
    projection_corrections: Optional[np.ndarray] = None
    richardson_error: Optional[float] = None

    @property
    def max_projection_correction(self) -> float:
        if self.projection_corrections is None or self.projection_corrections.size == 0:
            return 0.0
        return float(np.max(self.projection_corrections))


class TransportSummary(BaseModel):
    """Transport diagnostics written to reports."""

    curve: str
    steps: int
    samples: int
    max_drift: float
    richardson_error: float
    max_projection_correction: float
    reference_error: Optional[float] = None
    images: List[List[float]] = Field(default_factory=list)
