"""Kernel registry addressable by name string."""

import logging
from typing import Callable, Dict, List

from ..errors import ConfigurationError
from .base import MetricKernel
from .builtin import EuclideanKernel, FunkKernel, SphereKernel
from .expression import load_custom_file, load_riemannian_file
from .heisenberg import HeisenbergBerwaldMoorKernel

logger = logging.getLogger(__name__)

_BUILTIN: Dict[str, Callable[[], MetricKernel]] = {
    "euclidean": EuclideanKernel,
    "sphere": SphereKernel,
    "funk": FunkKernel,
    "heisenberg-bm": HeisenbergBerwaldMoorKernel,
}

_FILE_LOADERS: Dict[str, Callable[[str], MetricKernel]] = {
    "riemannian": load_riemannian_file,
    "custom": load_custom_file,
}

# Jitted derivative code is cached per kernel instance, so instances are reused.
_CACHE: Dict[str, MetricKernel] = {}


def available_kernels() -> List[str]:
    return sorted(_BUILTIN) + [f"{prefix}:<file>" for prefix in sorted(_FILE_LOADERS)]


def get_kernel(spec: str) -> MetricKernel:
    """Resolve 'euclidean', 'euclidean:<n>', 'sphere', 'funk', 'heisenberg-bm',
    'riemannian:<file>' or 'custom:<file>'."""
    spec = spec.strip()
    if spec in _CACHE:
        return _CACHE[spec]

    name, _, argument = spec.partition(":")
    if name in _FILE_LOADERS:
        if not argument:
            raise ConfigurationError(f"Kernel '{name}' needs a file: '{name}:<file>'")
        kernel = _FILE_LOADERS[name](argument)
    elif name == "euclidean" and argument:
        try:
            dim = int(argument)
        except ValueError:
            raise ConfigurationError(f"Invalid Euclidean dimension in '{spec}'")
        if dim < 1:
            raise ConfigurationError(f"Invalid Euclidean dimension in '{spec}'")
        kernel = EuclideanKernel(dim)
    elif name in _BUILTIN and not argument:
        kernel = _BUILTIN[name]()
    else:
        raise ConfigurationError(
            f"Unknown kernel '{spec}'. Available: {', '.join(available_kernels())}"
        )

    logger.debug(f"Resolved kernel '{spec}' -> {kernel!r}")
    _CACHE[spec] = kernel
    return kernel
