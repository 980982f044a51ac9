"""Command orchestration and report rendering."""

from .pipeline import ANALYZE_SECTIONS, AnalysisPipeline
from .reports import FORMATS, rank_rows, render, render_csv, render_json, render_text, write_report

__all__ = [
    "ANALYZE_SECTIONS",
    "AnalysisPipeline",
    "FORMATS",
    "rank_rows",
    "render",
    "render_csv",
    "render_json",
    "render_text",
    "write_report",
]
