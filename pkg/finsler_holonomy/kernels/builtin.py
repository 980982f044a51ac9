"""Built-in kernels: Euclidean, Riemannian, round sphere and Funk."""

from typing import Callable, Optional

import jax.numpy as jnp
import numpy as np

from .base import MetricKernel


class EuclideanKernel(MetricKernel):
    """F = sum of squares of the fiber coordinates."""

    positive_definite_claim = True

    def __init__(self, dim: int = 3):
        self.dim = dim
        self.name = "euclidean" if dim == 3 else f"euclidean:{dim}"

    def metric(self, x, y):
        return jnp.sum(y * y)


class RiemannianKernel(MetricKernel):
    """F = g_ij(x) y^i y^j for a symmetric coefficient matrix g(x)."""

    positive_definite_claim = True

    def __init__(
        self,
        metric_matrix: Callable,
        dim: int,
        name: str = "riemannian",
        positive_definite: bool = True,
    ):
        self.metric_matrix = metric_matrix
        self.dim = dim
        self.name = name
        self.positive_definite_claim = positive_definite

    def metric(self, x, y):
        return y @ self.metric_matrix(x) @ y


def _round_sphere_matrix(x):
    conformal = 4.0 / (1.0 + jnp.sum(x * x)) ** 2
    return conformal * jnp.eye(x.shape[0])


class SphereKernel(RiemannianKernel):
    """Unit sphere in stereographic coordinates, g = 4 delta / (1 + |x|^2)^2."""

    def __init__(self, dim: int = 3):
        super().__init__(_round_sphere_matrix, dim=dim, name="sphere")


class FunkKernel(MetricKernel):
    """Squared Funk metric of the open unit ball; flag curvature -1/4."""

    positive_definite_claim = True

    def __init__(self, dim: int = 3, default_x: Optional[np.ndarray] = None):
        self.dim = dim
        self.name = "funk"
        self._default_x = (
            np.asarray(default_x, dtype=float)
            if default_x is not None
            else np.array([0.3, 0.1, -0.2])[:dim]
        )

    def metric(self, x, y):
        s = 1.0 - jnp.sum(x * x)
        xy = jnp.dot(x, y)
        root = jnp.sqrt(jnp.sum(y * y) * s + xy * xy)
        return ((root + xy) / s) ** 2

    def cone_margin(self, x, y):
        inside = 1.0 - jnp.sum(x * x)
        return jnp.where(jnp.sum(y * y) > 0, jnp.minimum(1.0, inside), 0.0)

    def default_point(self) -> np.ndarray:
        # x = 0 is a Riemannian point of the Funk metric
        return self._default_x.copy()
