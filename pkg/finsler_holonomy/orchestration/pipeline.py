"""Section-by-section runs behind the analyze, transport and verify-appendix commands."""

import logging
import uuid
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from langgraph.checkpoint.memory import MemorySaver
from langgraph.graph import END, StateGraph

from .. import __version__
from ..config import Config
from ..algebra import generate_algebra, required_samples
from ..errors import ConfigurationError, ConsistencyError, FinslerError, ValidationError
from ..evaluation import SectionTimer
from ..geometry import (
    connection_data,
    connection_summary,
    constant_curvature_fit,
    riemannian_point_test,
    sample_indicatrix,
    validate_minkowski_axioms,
)
from ..heisenberg import (
    AppendixVerifier,
    create_verification_report,
    first_failure,
    infinite_dim_evidence,
)
from ..kernels import MetricKernel, get_kernel
from ..models import (
    DeterministicReport,
    ErrorInfo,
    IndicatrixSampleSet,
    PipelineState,
    Report,
    RunConfig,
    SectionResult,
    SectionStatus,
    TransportSummary,
)
from ..transport import (
    curve_start,
    is_closed,
    metric_drift,
    parse_curve,
    reference_holonomy,
    richardson_error,
    tabulate_holonomy,
    transport_batch,
)

logger = logging.getLogger(__name__)

ANALYZE_SECTIONS = ("metric_validation", "connection", "curvature_fit", "riemannian_test", "algebra")


class AnalysisPipeline:
    """Runs report sections as a LangGraph workflow; the first failing section stops the run."""

    def __init__(self, config: RunConfig, command: str = "analyze"):
        self.config = config
        self.command = command
        self.timer = SectionTimer()
        self.report = DeterministicReport(
            command=command,
            tool_version=__version__,
            config=config,
            environment=Config.environment(),
        )
        self._samples: Optional[IndicatrixSampleSet] = None
        self._kernel: Optional[MetricKernel] = None

    @property
    def kernel(self) -> MetricKernel:
        if self._kernel is None:
            self._kernel = get_kernel(self.config.kernel)
        return self._kernel

    @property
    def base_point(self) -> np.ndarray:
        if self.config.base_point is None:
            return self.kernel.default_point()
        x = np.asarray(self.config.base_point, dtype=float)
        if x.shape != (self.kernel.dim,):
            raise ConfigurationError(
                f"Base point has {x.size} coordinates, kernel '{self.kernel.name}' has dimension {self.kernel.dim}"
            )
        return x

    def _margin(self) -> float:
        return max(self.config.tolerances.cone_margin, self.kernel.sampling_margin)

    def _sample(self, x: np.ndarray, count: int) -> IndicatrixSampleSet:
        return sample_indicatrix(
            self.kernel, x, count, self.config.seed, margin=self._margin(), tolerances=self.config.tolerances
        )

    @property
    def samples(self) -> IndicatrixSampleSet:
        if self._samples is None:
            self._samples = self._sample(self.base_point, self.config.sample_count)
        return self._samples

    def _safe_run_section(
        self, name: str, run: Callable[[], Dict[str, Any]]
    ) -> Tuple[SectionResult, Optional[ErrorInfo]]:
        """Run one section, recording status and the error that stopped it."""
        section = SectionResult(name=name, status=SectionStatus.IN_PROGRESS)
        error: Optional[ErrorInfo] = None
        self.timer.start_section(name)
        try:
            logger.info(f"Running section '{name}'")
            section.data = run()
            section.status = SectionStatus.COMPLETED
            logger.info(f"Section '{name}' completed")
        except FinslerError as e:
            logger.error(f"Section '{name}' failed: {e}")
            section.status = SectionStatus.FAILED
            section.error = str(e)
            section.data = getattr(e, "data", None) or {}
            error = ErrorInfo(
                kind=type(e).__name__,
                message=str(e),
                exit_code=e.exit_code,
                check=getattr(e, "check", None),
            )
        finally:
            self.timer.end_section(name)
        return section, error

    def _section_node(self, name: str, run: Callable[[], Dict[str, Any]]) -> Callable:
        def node(state: PipelineState) -> Dict[str, Any]:
            section, error = self._safe_run_section(name, run)
            update: Dict[str, Any] = {"sections": state.sections + [section]}
            if error is not None:
                update["exit_status"] = error.exit_code
                update["error"] = error
            return update

        return node

    def _start_processing(self, state: PipelineState) -> Dict[str, Any]:
        logger.info(f"Starting '{state.command}' with sections {state.planned}")
        return {}

    def _route(self, state: PipelineState) -> str:
        return "stop" if state.exit_status != 0 else "continue"

    def _finish(self, state: PipelineState) -> Dict[str, Any]:
        """Record every planned section that never ran as skipped."""
        ran = {s.name for s in state.sections}
        skipped = [
            SectionResult(name=name, status=SectionStatus.SKIPPED)
            for name in state.planned
            if name not in ran
        ]
        if skipped:
            logger.info(f"Skipping sections after failure: {[s.name for s in skipped]}")
        return {"sections": state.sections + skipped}

    def _build_graph(self, sections: List[Tuple[str, Callable[[], Dict[str, Any]]]]):
        """One node per section; a failed section routes straight to the finish node."""
        workflow = StateGraph(PipelineState)
        workflow.add_node("start", self._start_processing)
        workflow.add_node("finish", self._finish)

        names = [name for name, _ in sections]
        for name, run in sections:
            workflow.add_node(name, self._section_node(name, run))

        workflow.add_edge("start", names[0])
        for name, following in zip(names, names[1:] + ["finish"]):
            workflow.add_conditional_edges(
                name, self._route, {"continue": following, "stop": "finish"}
            )
        workflow.add_edge("finish", END)

        workflow.set_entry_point("start")

        return workflow.compile(checkpointer=MemorySaver())

    def _run_sections(self, sections: List[Tuple[str, Callable[[], Dict[str, Any]]]]) -> Report:
        graph = self._build_graph(sections)
        initial_state = PipelineState(command=self.command, planned=[name for name, _ in sections])

        self.timer.start()
        config = {"configurable": {"thread_id": str(uuid.uuid4())}}
        result = graph.invoke(initial_state, config=config)

        self.report.sections = [SectionResult.model_validate(s) for s in result["sections"]]
        self.report.exit_status = result.get("exit_status", 0)
        error = result.get("error")
        self.report.error = None if error is None else ErrorInfo.model_validate(error)
        return Report(deterministic=self.report, timings=self.timer.report())

    # analyze

    def run_analyze(self) -> Report:
        """validate -> connection -> curvature fit -> semi-Riemannian test -> algebra."""
        runners = {
            "metric_validation": self._metric_validation,
            "connection": self._connection,
            "curvature_fit": self._curvature_fit,
            "riemannian_test": self._riemannian_test,
            "algebra": self._algebra,
        }
        return self._run_sections([(name, runners[name]) for name in ANALYZE_SECTIONS])

    def _metric_validation(self) -> Dict[str, Any]:
        axioms = validate_minkowski_axioms(self.kernel, self.samples, tolerances=self.config.tolerances)
        if not axioms.passed:
            raise ValidationError(
                f"Kernel '{self.kernel.name}' fails the Minkowski axioms at x={self.samples.x.tolist()}"
            )
        return {
            "kernel": self.kernel.name,
            "dimension": self.kernel.dim,
            "base_point": self.samples.x.tolist(),
            "samples": self.samples.count,
            "acceptance_rate": self.samples.acceptance_rate,
            "axioms": axioms.model_dump(),
        }

    def _connection(self) -> Dict[str, Any]:
        data = connection_data(self.kernel, self.samples.samples()[0], self.config.tolerances)
        return connection_summary(data).model_dump()

    def _curvature_fit(self) -> Dict[str, Any]:
        return constant_curvature_fit(
            self.kernel, self.base_point, self.samples, self.config.tolerances
        ).model_dump()

    def _riemannian_test(self) -> Dict[str, Any]:
        return riemannian_point_test(
            self.kernel, self.base_point, self.samples, self.config.tolerances.tol_semi_riemannian
        ).model_dump()

    def _algebra(self) -> Dict[str, Any]:
        n = self.kernel.dim
        needed = required_samples(n, n * (n - 1) // 2, self.config.depth)
        samples = self.samples
        if needed > samples.count:
            logger.warning(
                f"Algebra to depth {self.config.depth} needs {needed} samples; "
                f"drawing {needed} instead of {samples.count}"
            )
            samples = self._sample(self.base_point, needed)
        report = generate_algebra(
            self.kernel, self.base_point, None, self.config.depth, samples, self.config.tolerances.tol_rank
        )
        data = report.model_dump()
        data["rank_by_depth"] = report.rank_by_depth
        data["tangency_defect_by_depth"] = [d.max_tangency_defect for d in report.fields_by_depth]
        return data

    # transport

    def run_transport(self) -> Report:
        return self._run_sections([("transport", self._transport)])

    def _transport(self) -> Dict[str, Any]:
        if not self.config.curve:
            raise ConfigurationError("Transport needs a curve (--curve)")
        curve = parse_curve(self.config.curve, self.base_point, self.kernel.dim)
        start = curve_start(curve) if curve.pieces else self.base_point
        samples = self._sample(start, self.config.sample_count)
        steps = self.config.steps

        raw = transport_batch(self.kernel, curve, samples.points, steps)
        error = richardson_error(self.kernel, curve, samples.points, steps, coarse=raw)
        if is_closed(curve):
            element = tabulate_holonomy(
                self.kernel, curve, samples, raw, steps, self.config.tolerances, error
            )
            images = element.images
            correction = element.max_projection_correction
        else:
            images = raw
            correction = 0.0

        drift = float(np.max(metric_drift(self.kernel, curve, samples.points, raw)))
        reference = reference_holonomy(self.kernel.name, curve.name) if is_closed(curve) else None
        reference_error = None
        if reference is not None:
            reference_error = float(np.max(np.abs(images - reference(samples.points))))

        summary = TransportSummary(
            curve=curve.name,
            steps=steps,
            samples=samples.count,
            max_drift=drift,
            richardson_error=error,
            max_projection_correction=correction,
            reference_error=reference_error,
            images=images.tolist(),
        )
        data = summary.model_dump()
        data["closed"] = is_closed(curve)
        data["domain"] = samples.points.tolist()
        return data

    # verify-appendix

    def run_verify_appendix(
        self,
        method: str = "auto",
        oracle_tol: Optional[float] = None,
        sign_flip: Optional[Tuple[int, int]] = None,
    ) -> Report:
        verifier = AppendixVerifier(
            method=method, oracle_tol=oracle_tol, sign_flip=sign_flip, tolerances=self.config.tolerances
        )
        return self._run_sections(
            [
                ("appendix_checks", lambda: self._appendix_checks(verifier)),
                ("infinite_dim_evidence", self._evidence),
            ]
        )

    def _appendix_checks(self, verifier: AppendixVerifier) -> Dict[str, Any]:
        all_passed, checks = verifier.run_all()
        data = {
            "all_passed": all_passed,
            "checks": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "max_error": c.max_error,
                    "tolerance": c.tolerance,
                    "detail": c.detail,
                }
                for c in checks
            ],
            "summary": create_verification_report(checks),
        }
        failed = first_failure(checks)
        if failed is not None:
            raise ConsistencyError(
                f"Appendix check '{failed.name}' failed: max error {failed.max_error:.3e} "
                f"> {failed.tolerance:.1e}",
                check=failed.name,
                max_error=failed.max_error,
                data=data,
            )
        return data

    def _evidence(self) -> Dict[str, Any]:
        table = infinite_dim_evidence(
            max_depth=4,
            samples=160,
            seed=self.config.seed,
            tol_rank=self.config.tolerances.tol_rank,
            source="closed-form",
        )
        if not table.strictly_increasing:
            raise ConsistencyError(
                f"Heisenberg ranks are not strictly increasing: {[r.rank for r in table.rows]}",
                check="infinite_dim_evidence",
            )
        return table.model_dump()
