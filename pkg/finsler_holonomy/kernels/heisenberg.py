"""Left-invariant Berwald-Moor kernel on the Heisenberg group."""

import jax.numpy as jnp

from .base import MetricKernel


class HeisenbergBerwaldMoorKernel(MetricKernel):
    """F(x, y) = (y1 (y2 - x1 y3) y3)^(2/3), smooth on the positive cone.

    The cone is the component where all three factors are positive; the margin
    is the smallest factor divided by |y|. The metric is indefinite there.
    """

    name = "heisenberg-bm"
    dim = 3
    positive_definite_claim = False
    sampling_margin = 0.3

    def metric(self, x, y):
        product = y[0] * (y[1] - x[0] * y[2]) * y[2]
        return jnp.cbrt(product) ** 2

    def cone_margin(self, x, y):
        norm = jnp.sqrt(jnp.sum(y * y))
        factors = jnp.stack([y[0], y[1] - x[0] * y[2], y[2]])
        return jnp.where(norm > 0, jnp.min(factors) / jnp.where(norm > 0, norm, 1.0), 0.0)
