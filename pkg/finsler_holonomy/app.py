"""Command-line entry point for the Finsler Holonomy toolkit."""

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional, Tuple

from . import __version__
from .config import Config
from .errors import ConfigurationError, FinslerError
from .geometry.oracle import METHODS
from .models import Report, RunConfig
from .orchestration import FORMATS, AnalysisPipeline, write_report

logger = logging.getLogger(__name__)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=str, help="JSON run configuration; flags override it")
    parser.add_argument("--kernel", type=str, help="Kernel name, e.g. euclidean, sphere, funk, heisenberg-bm")
    parser.add_argument("--point", type=str, help="Base point as comma-separated coordinates")
    parser.add_argument("--samples", type=int, help="Number of indicatrix samples")
    parser.add_argument("--seed", type=int, help="Sampling seed")
    parser.add_argument("--depth", type=int, help="Bracket depth of the curvature algebra")
    parser.add_argument("--steps", type=int, help="RK4 steps per curve piece")
    parser.add_argument("--tol-rank", type=float, help="Relative singular-value threshold")
    parser.add_argument("--out", type=str, help="Report file (bare names go to the output directory)")
    parser.add_argument("--format", choices=FORMATS, help="Report format (default: json)")
    parser.add_argument("--log-level", type=str, help="Logging level (default from environment)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="finsler-holonomy",
        description="Finsler Holonomy: curvature algebras and holonomy of Finsler kernels",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    analyze = commands.add_parser("analyze", help="Validate, fit curvature and generate the curvature algebra")
    _add_common(analyze)

    transport = commands.add_parser("transport", help="Parallel transport and loop holonomy")
    _add_common(transport)
    transport.add_argument(
        "--curve", type=str, help="octant | square(plane=ij, side=t[, anchor=[..]]) | polyline:[..] | file:<path>"
    )

    verify = commands.add_parser("verify-appendix", help="Run the Heisenberg golden checks")
    _add_common(verify)
    verify.add_argument("--method", choices=METHODS, default="auto", help="Derivative oracle method")
    verify.add_argument("--tol", type=float, help="Tolerance of the derivative-oracle check")
    verify.add_argument(
        "--inject-sign-flip", type=str, metavar="IJ", help="Negate the closed form r(i,j), e.g. 13 (test mode)"
    )
    return parser


def _parse_point(text: str) -> List[float]:
    try:
        return [float(v) for v in text.replace("[", "").replace("]", "").split(",") if v.strip()]
    except ValueError:
        raise ConfigurationError(f"Invalid --point '{text}': expected comma-separated numbers")


def _parse_pair(text: Optional[str]) -> Optional[Tuple[int, int]]:
    if text is None:
        return None
    digits = text.replace(",", "").replace("(", "").replace(")", "").strip()
    if len(digits) != 2 or not digits.isdigit():
        raise ConfigurationError(f"--inject-sign-flip needs two digits like 13, got '{text}'")
    return int(digits[0]), int(digits[1])


def build_config(args: argparse.Namespace) -> RunConfig:
    """Config file first, then flag overrides, then validation."""
    raw: Dict[str, Any] = {}
    if args.config:
        raw = RunConfig.from_file(args.config).model_dump(exclude_unset=True)
    overrides = {
        "kernel": args.kernel,
        "sample_count": args.samples,
        "seed": args.seed,
        "depth": args.depth,
        "steps": args.steps,
        "curve": getattr(args, "curve", None),
    }
    raw.update({key: value for key, value in overrides.items() if value is not None})
    if args.point is not None:
        raw["base_point"] = _parse_point(args.point)
    if args.tol_rank is not None:
        raw["tolerances"] = {**raw.get("tolerances", {}), "tol_rank": args.tol_rank}
    outputs = dict(raw.get("outputs", {}))
    if args.out is not None:
        outputs["path"] = args.out
    if args.format is not None:
        outputs["format"] = args.format
    raw["outputs"] = outputs
    return RunConfig.build(raw)


def run_command(args: argparse.Namespace, config: RunConfig) -> Report:
    pipeline = AnalysisPipeline(config, command=args.command)
    if args.command == "analyze":
        return pipeline.run_analyze()
    if args.command == "transport":
        return pipeline.run_transport()
    return pipeline.run_verify_appendix(
        method=args.method, oracle_tol=args.tol, sign_flip=_parse_pair(args.inject_sign_flip)
    )


def _print_summary(report: Report) -> None:
    det = report.deterministic
    for section in det.sections:
        glyph = {"completed": "✅", "failed": "❌", "skipped": "⚠️"}.get(section.status.value, "•")
        print(f"{glyph} {section.name}: {section.status.value}")
    if det.error is not None:
        where = f" (check: {det.error.check})" if det.error.check else ""
        print(f"❌ {det.error.kind}{where}: {det.error.message}")
    else:
        print(f"✅ {det.command} finished in {report.timings.total_seconds:.2f}s")


def main(argv: Optional[List[str]] = None) -> int:
    """Parse flags, run one command, emit the report; returns the exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=Config.log_level(args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        config = build_config(args)
    except FinslerError as e:
        print(f"❌ Configuration error: {e}", file=sys.stderr)
        return e.exit_code

    try:
        report = run_command(args, config)
    except FinslerError as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code

    _print_summary(report)
    fmt = config.outputs.format
    path = Config.resolve_output_path(config.outputs.path)
    try:
        content = write_report(report, path, fmt)
    except FinslerError as e:
        print(f"❌ {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"❌ Cannot write report: {e}", file=sys.stderr)
        return ConfigurationError.exit_code
    if path is None:
        print(content, end="")
    else:
        print(f"📄 Report written to {path}")
    return report.exit_status


if __name__ == "__main__":
    sys.exit(main())
