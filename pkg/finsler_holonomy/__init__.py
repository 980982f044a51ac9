"""Finsler Holonomy: curvature algebras and holonomy of Finsler manifolds."""

from .config import NumericsConfig

NumericsConfig.setup_precision()

__version__ = "0.1.0"
__author__ = "Pedro"
__email__ = "pedro@example.com"
