"""Run timing for the Finsler Holonomy toolkit."""

from .timing import SectionTimer

__all__ = ["SectionTimer"]
