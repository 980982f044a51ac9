"""Base class for metric kernels."""

from abc import ABC, abstractmethod
from typing import Optional

import jax.numpy as jnp
import numpy as np

from ..errors import ValidationError


class MetricKernel(ABC):
    """A Finsler structure given by F(x, y), homogeneous of degree two in y.

    ``metric`` and ``cone_margin`` must be jax-traceable; everything the toolkit
    computes (fundamental tensor, spray, curvature, transport) is derived from them.
    """

    name: str = "kernel"
    dim: int = 3
    positive_definite_claim: bool = False
    sampling_margin: float = 0.0

    @abstractmethod
    def metric(self, x, y):
        """Evaluate F(x, y)."""
        pass

    def cone_margin(self, x, y):
        """Relative distance of y from the cone boundary; positive inside the cone.

        The default cone is the whole slit tangent space.
        """
        return jnp.where(jnp.sum(y * y) > 0, 1.0, 0.0)

    def cone_test(self, x, y, margin: float = 0.0) -> bool:
        """Membership in the open cone with margin delta >= 0."""
        x, y = self.check_shapes(x, y)
        value = float(self.cone_margin(jnp.asarray(x), jnp.asarray(y)))
        return bool(np.isfinite(value) and value > margin)

    def default_point(self) -> np.ndarray:
        return np.zeros(self.dim)

    def check_shapes(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape != (self.dim,) or y.shape != (self.dim,):
            raise ValidationError(
                f"Kernel '{self.name}' expects {self.dim}-vectors, "
                f"got x{x.shape} and y{y.shape}"
            )
        return x, y

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r}, dim={self.dim})"


class FrozenKernel(MetricKernel):
    """Minkowski functional y -> F(x0, y) of another kernel, constant in x."""

    def __init__(self, kernel: MetricKernel, x0, name: Optional[str] = None):
        self.kernel = kernel
        self.x0 = jnp.asarray(np.asarray(x0, dtype=float))
        self.name = name or f"{kernel.name}@frozen"
        self.dim = kernel.dim
        self.positive_definite_claim = kernel.positive_definite_claim
        self.sampling_margin = kernel.sampling_margin

    def metric(self, x, y):
        return self.kernel.metric(self.x0, y)

    def cone_margin(self, x, y):
        return self.kernel.cone_margin(self.x0, y)
