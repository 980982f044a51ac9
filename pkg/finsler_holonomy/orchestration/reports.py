"""Report rendering: JSON (stable key order), aligned text and CSV rank tables."""

import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Iterable, List, Optional, Tuple

from ..errors import ConfigurationError
from ..models import Report

logger = logging.getLogger(__name__)

FORMATS = ("json", "text", "csv")


def render_json(report: Report, include_timings: bool = True) -> str:
    """Sorted keys and fixed indentation so identical runs give identical bytes."""
    payload = {"deterministic": report.deterministic.model_dump(mode="json")}
    if include_timings:
        payload["timings"] = report.timings.model_dump(mode="json")
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _flatten(prefix: str, value: Any) -> Iterable[Tuple[str, str]]:
    if isinstance(value, dict):
        for key in sorted(value):
            yield from _flatten(f"{prefix}.{key}" if prefix else str(key), value[key])
    elif isinstance(value, list) and value and isinstance(value[0], (list, dict)):
        yield prefix, f"[{len(value)} entries]"
    elif isinstance(value, float):
        yield prefix, f"{value:.10g}"
    elif isinstance(value, str) and "\n" in value:
        yield prefix, value.splitlines()[0]
    else:
        yield prefix, str(value)


def render_text(report: Report) -> str:
    """Two aligned columns: dotted key and value."""
    det = report.deterministic
    rows: List[Tuple[str, str]] = [
        ("command", det.command),
        ("tool_version", det.tool_version),
        ("environment", det.environment),
        ("kernel", det.config.kernel),
        ("exit_status", str(det.exit_status)),
    ]
    if det.error is not None:
        rows.append(("error", f"{det.error.kind}: {det.error.message}"))
    for section in det.sections:
        rows.append((section.name, section.status.value))
        rows.extend(_flatten(section.name, section.data))
    width = max(len(key) for key, _ in rows)
    lines = [f"{key:<{width}}  {value}" for key, value in rows]
    lines.append(f"{'total_seconds':<{width}}  {report.timings.total_seconds:.3f}")
    return "\n".join(lines) + "\n"


def rank_rows(report: Report) -> List[Tuple[int, int, int]]:
    """(depth, cumulative fields, rank) from an algebra or evidence section."""
    algebra = report.deterministic.section("algebra")
    if algebra is not None and algebra.data:
        rows = []
        total = 0
        for depth in algebra.data.get("fields_by_depth", []):
            total += len(depth["labels"])
            rows.append((depth["depth"], total, depth["rank"]))
        return rows
    evidence = report.deterministic.section("infinite_dim_evidence")
    if evidence is not None and evidence.data:
        return [(r["depth"], r["fields"], r["rank"]) for r in evidence.data.get("rows", [])]
    return []


def render_csv(report: Report) -> str:
    rows = rank_rows(report)
    if not rows:
        raise ConfigurationError(
            f"CSV output needs a rank table; '{report.deterministic.command}' produced none"
        )
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["depth", "fields", "rank"])
    writer.writerows(rows)
    return buffer.getvalue()


def render(report: Report, fmt: str = "json") -> str:
    if fmt == "json":
        return render_json(report)
    if fmt == "text":
        return render_text(report)
    if fmt == "csv":
        return render_csv(report)
    raise ConfigurationError(f"Unknown report format '{fmt}', expected one of {FORMATS}")


def write_report(report: Report, path: Optional[Path], fmt: str = "json") -> str:
    """Render and, when a path is given, write the report (parent directories created)."""
    content = render(report, fmt)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding="utf-8")
        logger.info(f"Report written to {path}")
    return content
