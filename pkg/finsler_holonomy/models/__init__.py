"""Models for the Finsler Holonomy toolkit."""

from .algebra import (
    AlgebraReport,
    DepthSummary,
    EvidenceRow,
    EvidenceTable,
    OperatorAlgebraReport,
    TabulatedField,
)
from .geometry import (
    AxiomReport,
    ConnectionData,
    ConnectionSummary,
    CurvatureFitReport,
    HomogeneityReport,
    IndicatrixSampleSet,
    RiemannianPointReport,
    TangentSample,
)
from .run import (
    DEFAULT_TOLERANCES,
    DeterministicReport,
    ErrorInfo,
    OutputSpec,
    PipelineState,
    Report,
    RunConfig,
    SectionResult,
    SectionStatus,
    TimingReport,
    Tolerances,
)
from .transport import (
    ArcPiece,
    CurveSpec,
    HolonomyElement,
    SegmentPiece,
    TransportSummary,
)

__all__ = [
    "AlgebraReport",
    "ArcPiece",
    "AxiomReport",
    "ConnectionData",
    "ConnectionSummary",
    "CurveSpec",
    "CurvatureFitReport",
    "DEFAULT_TOLERANCES",
    "DepthSummary",
    "DeterministicReport",
    "ErrorInfo",
    "EvidenceRow",
    "EvidenceTable",
    "HolonomyElement",
    "HomogeneityReport",
    "IndicatrixSampleSet",
    "OperatorAlgebraReport",
    "OutputSpec",
    "PipelineState",
    "Report",
    "RiemannianPointReport",
    "RunConfig",
    "SectionResult",
    "SectionStatus",
    "SegmentPiece",
    "TabulatedField",
    "TangentSample",
    "TimingReport",
    "Tolerances",
    "TransportSummary",
]
