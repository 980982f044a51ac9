"""Wall-clock timing of report sections, kept apart from deterministic output."""

import logging
import time
from typing import Dict, Optional

from ..models import TimingReport

logger = logging.getLogger(__name__)


class SectionTimer:
    """Start/end timing per section plus a total."""

    def __init__(self):
        self.start_time: Optional[float] = None
        self.section_start_times: Dict[str, float] = {}
        self.section_seconds: Dict[str, float] = {}

    def start(self) -> None:
        self.start_time = time.perf_counter()
        logger.debug("Section timing started")

    def start_section(self, name: str) -> None:
        self.section_start_times[name] = time.perf_counter()

    def end_section(self, name: str) -> None:
        started = self.section_start_times.pop(name, None)
        if started is None:
            logger.warning(f"Section '{name}' ended without being started")
            return
        self.section_seconds[name] = time.perf_counter() - started
        logger.debug(f"Section '{name}' took {self.section_seconds[name]:.3f}s")

    def report(self) -> TimingReport:
        if self.start_time is None:
            logger.warning("Timing not started - reporting section times only")
            total = sum(self.section_seconds.values())
        else:
            total = time.perf_counter() - self.start_time
        return TimingReport(total_seconds=total, sections=dict(self.section_seconds))
