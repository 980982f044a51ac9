"""Derivative oracle: mixed partials of F up to total order five.

The exact path nests forward-mode jvp along coordinate directions of z = (x, y)
and jits one function per multi-index. The fallback is nested central
differences with one Richardson step.
"""

import logging
from functools import lru_cache
from typing import Callable, Sequence, Tuple

import jax
import jax.numpy as jnp
import numpy as np

from ..errors import DomainError, UnsupportedOrderError, ValidationError
from ..kernels.base import MetricKernel
from ..models import DEFAULT_TOLERANCES, TangentSample, Tolerances

logger = logging.getLogger(__name__)

MAX_ORDER = 5
METHODS = ("auto", "exact", "fd")


def _multi_index(values: Sequence[int], dim: int, label: str) -> Tuple[int, ...]:
    index = tuple(int(v) for v in values)
    if len(index) != dim or any(v < 0 for v in index):
        raise ValidationError(f"{label} must be {dim} non-negative integers, got {list(values)}")
    return index


def coordinate_indices(alpha: Sequence[int], beta: Sequence[int], dim: int) -> Tuple[int, ...]:
    """Positions in z = (x, y) to differentiate along, one entry per order."""
    alpha = _multi_index(alpha, dim, "alpha")
    beta = _multi_index(beta, dim, "beta")
    indices = []
    for i, count in enumerate(alpha):
        indices.extend([i] * count)
    for i, count in enumerate(beta):
        indices.extend([dim + i] * count)
    return tuple(indices)


def _stacked_metric(kernel: MetricKernel) -> Callable:
    n = kernel.dim

    def f(z):
        return kernel.metric(z[:n], z[n:])

    return f


@lru_cache(maxsize=None)
def _exact_partial(kernel: MetricKernel, indices: Tuple[int, ...]) -> Callable:
    size = 2 * kernel.dim
    fn = _stacked_metric(kernel)
    for index in indices:
        fn = _directional(fn, jnp.zeros(size).at[index].set(1.0))
    return jax.jit(fn)


def _directional(fn: Callable, direction) -> Callable:
    def derivative(z):
        return jax.jvp(fn, (z,), (direction,))[1]

    return derivative


@lru_cache(maxsize=None)
def _jitted_metric(kernel: MetricKernel) -> Callable:
    return jax.jit(_stacked_metric(kernel))


def _central(f: Callable, z: np.ndarray, indices: Tuple[int, ...], h: float) -> float:
    if not indices:
        return float(f(z))
    head, rest = indices[0], indices[1:]
    forward = z.copy()
    forward[head] += h
    backward = z.copy()
    backward[head] -= h
    return (_central(f, forward, rest, h) - _central(f, backward, rest, h)) / (2.0 * h)


def fd_step(order: int, z: np.ndarray, base_step: float) -> float:
    """Order-dependent step balancing truncation against cancellation."""
    scale = max(1.0, float(np.max(np.abs(z))))
    return base_step ** (4.0 / (order + 3.0)) * scale


class DerivativeOracle:
    """Partial derivatives d^{|a|+|b|} F / dx^a dy^b at a tangent sample."""

    def __init__(
        self,
        kernel: MetricKernel,
        method: str = "auto",
        tolerances: Tolerances = DEFAULT_TOLERANCES,
    ):
        if method not in METHODS:
            raise ValidationError(f"Unknown oracle method '{method}', expected one of {METHODS}")
        self.kernel = kernel
        self.method = method
        self.tolerances = tolerances

    def partial(self, sample: TangentSample, alpha: Sequence[int], beta: Sequence[int]) -> float:
        indices = coordinate_indices(alpha, beta, self.kernel.dim)
        order = len(indices)
        if order > MAX_ORDER:
            raise UnsupportedOrderError(
                f"Derivative order {order} exceeds the supported maximum {MAX_ORDER}",
                order=order,
                max_order=MAX_ORDER,
            )
        if not self.kernel.cone_test(sample.x, sample.y, self.tolerances.cone_margin):
            raise DomainError(
                f"Sample outside the cone of '{self.kernel.name}' "
                f"(margin {self.tolerances.cone_margin}): x={sample.x.tolist()}, y={sample.y.tolist()}",
                x=sample.x,
                y=sample.y,
            )

        z = np.concatenate([sample.x, sample.y]).astype(float)
        if self.method in ("auto", "exact"):
            value = float(_exact_partial(self.kernel, indices)(jnp.asarray(z)))
            if np.isfinite(value) or self.method == "exact":
                return value
            logger.warning(
                f"Exact derivative not finite for {self.kernel.name} at order {order}; "
                "falling back to finite differences"
            )
        return self._finite_difference(z, indices)

    def _finite_difference(self, z: np.ndarray, indices: Tuple[int, ...]) -> float:
        f = _jitted_metric(self.kernel)
        if not indices:
            return float(f(z))
        h = fd_step(len(indices), z, self.tolerances.fd_base_step)
        coarse = _central(f, z, indices, h)
        fine = _central(f, z, indices, h / 2.0)
        return (4.0 * fine - coarse) / 3.0


def derivative_oracle(
    kernel: MetricKernel,
    sample: TangentSample,
    alpha: Sequence[int],
    beta: Sequence[int],
    method: str = "auto",
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """Convenience wrapper around DerivativeOracle.partial."""
    return DerivativeOracle(kernel, method, tolerances).partial(sample, alpha, beta)
