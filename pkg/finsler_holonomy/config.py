"""Configuration module for Finsler Holonomy."""

import logging
import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

load_dotenv()


class NumericsConfig:
    """Configuration for the jax numerics backend."""

    @classmethod
    def setup_precision(cls) -> None:
        """Enable 64-bit arithmetic; curvature needs fifth-order derivatives of F."""
        os.environ.setdefault("JAX_ENABLE_X64", "true")

        import jax

        jax.config.update("jax_enable_x64", True)

    @classmethod
    def is_x64_enabled(cls) -> bool:
        """Check if 64-bit jax arithmetic is active."""
        import jax

        return bool(jax.config.jax_enable_x64)


class Config:
    """Main configuration class."""

    # Output
    OUTPUT_DIR = os.getenv("FINSLER_HOLONOMY_OUTPUT_DIR", "reports")

    # Logging
    LOG_LEVEL = os.getenv("FINSLER_HOLONOMY_LOG_LEVEL", "INFO")

    # Environment
    ENVIRONMENT = os.getenv("FINSLER_HOLONOMY_ENVIRONMENT", "dev")

    # Algebra
    TANGENCY_TOL = os.getenv("FINSLER_HOLONOMY_TANGENCY_TOL", "1e-5")

    @classmethod
    def environment(cls) -> str:
        return os.getenv("FINSLER_HOLONOMY_ENVIRONMENT", cls.ENVIRONMENT)

    @classmethod
    def tangency_tol(cls) -> float:
        """Tangency closure threshold for generated fields, read at call time."""
        value = os.getenv("FINSLER_HOLONOMY_TANGENCY_TOL", cls.TANGENCY_TOL)
        try:
            return float(value)
        except ValueError:
            logging.getLogger(__name__).warning(
                f"Ignoring non-numeric FINSLER_HOLONOMY_TANGENCY_TOL={value!r}"
            )
            return float(cls.TANGENCY_TOL)

    @classmethod
    def output_dir(cls) -> Path:
        """Default directory for report files, read at call time."""
        return Path(os.getenv("FINSLER_HOLONOMY_OUTPUT_DIR", cls.OUTPUT_DIR))

    @classmethod
    def resolve_output_path(cls, out: Optional[str]) -> Optional[Path]:
        """Bare file names land in the output directory; paths are kept as given."""
        if not out:
            return None
        path = Path(out)
        if path.parent == Path("."):
            return cls.output_dir() / path
        return path

    @classmethod
    def log_level(cls, override: Optional[str] = None) -> int:
        """Resolve a logging level name, falling back to INFO."""
        name = (override or os.getenv("FINSLER_HOLONOMY_LOG_LEVEL", cls.LOG_LEVEL)).upper()
        level = logging.getLevelName(name)
        return level if isinstance(level, int) else logging.INFO
