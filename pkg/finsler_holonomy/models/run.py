"""Run configuration and report models."""

import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..errors import ConfigurationError


class Tolerances(BaseModel):
    """Numeric thresholds shared by every module."""

    model_config = ConfigDict(extra="forbid")

    tol_g_rel: float = 1e-10
    tol_inv: float = 1e-8
    tol_proj: float = 1e-10
    tol_hom: float = 1e-8
    cone_margin: float = 1e-3
    tol_tan: float = 1e-6
    tol_semi_riemannian: float = 1e-6
    tol_rank: float = 1e-7
    fd_base_step: float = 1e-4
    bracket_fd_step: float = 1e-3
    tol_transport: float = 1e-6


DEFAULT_TOLERANCES = Tolerances()


class OutputSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    path: Optional[str] = None
    format: Literal["json", "text", "csv"] = "json"


class RunConfig(BaseModel):
    """One CLI run; validated before any computation."""

    model_config = ConfigDict(extra="forbid")

    kernel: str = "euclidean"
    base_point: Optional[List[float]] = None
    sample_count: int = 40
    seed: int = 7
    depth: int = 3
    steps: int = 1000
    curve: Optional[str] = None
    tolerances: Tolerances = Field(default_factory=Tolerances)
    outputs: OutputSpec = Field(default_factory=OutputSpec)

    @field_validator("sample_count", "depth", "steps")
    @classmethod
    def _positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be a positive integer")
        return value

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        """Load a JSON config file; unknown keys are rejected."""
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigurationError(f"Config file not found: {path}")
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Config file {path} is not valid JSON: {e}")
        return cls.build(raw)

    @classmethod
    def build(cls, raw: Dict[str, Any]) -> "RunConfig":
        try:
            return cls.model_validate(raw)
        except ValidationError as e:
            raise ConfigurationError(f"Invalid run configuration: {e}")


class SectionStatus(str, Enum):
    """Status of individual report sections."""

    PENDING = "pending"
    IN_PROGRESS = "in_progress"
    COMPLETED = "completed"
    FAILED = "failed"
    SKIPPED = "skipped"


class SectionResult(BaseModel):
    name: str
    status: SectionStatus = SectionStatus.PENDING
    data: Dict[str, Any] = Field(default_factory=dict)
    error: Optional[str] = None


class ErrorInfo(BaseModel):
    kind: str
    message: str
    exit_code: int
    check: Optional[str] = None


class PipelineState(BaseModel):
    """State carried through the section graph."""

    command: str
    planned: List[str] = Field(default_factory=list)
    sections: List[SectionResult] = Field(default_factory=list)
    exit_status: int = 0
    error: Optional[ErrorInfo] = None


class DeterministicReport(BaseModel):
    """Everything that must be byte-identical across runs with the same config."""

    command: str
    tool_version: str
    config: RunConfig
    environment: str = "dev"
    sections: List[SectionResult] = Field(default_factory=list)
    exit_status: int = 0
    error: Optional[ErrorInfo] = None

    def section(self, name: str) -> Optional[SectionResult]:
        for section in self.sections:
            if section.name == name:
                return section
        return None


class TimingReport(BaseModel):
    total_seconds: float = 0.0
    sections: Dict[str, float] = Field(default_factory=dict)


class Report(BaseModel):
    deterministic: DeterministicReport
    timings: TimingReport = Field(default_factory=TimingReport)

    @property
    def exit_status(self) -> int:
        return self.deterministic.exit_status
