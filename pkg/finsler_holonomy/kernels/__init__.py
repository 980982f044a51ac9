"""Metric kernels for the Finsler Holonomy toolkit."""

from .base import FrozenKernel, MetricKernel
from .builtin import EuclideanKernel, FunkKernel, RiemannianKernel, SphereKernel
from .expression import (
    ExpressionKernel,
    compile_expression,
    load_custom_file,
    load_riemannian_file,
    parse_expression,
)
from .heisenberg import HeisenbergBerwaldMoorKernel
from .registry import available_kernels, get_kernel

__all__ = [
    "EuclideanKernel",
    "ExpressionKernel",
    "FrozenKernel",
    "FunkKernel",
    "HeisenbergBerwaldMoorKernel",
    "MetricKernel",
    "RiemannianKernel",
    "SphereKernel",
    "available_kernels",
    "compile_expression",
    "get_kernel",
    "load_custom_file",
    "load_riemannian_file",
    "parse_expression",
]
