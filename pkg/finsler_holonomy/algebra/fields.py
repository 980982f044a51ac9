"""Indicatrix vector fields, curvature fields and Lie brackets.

Fields are evaluated in batches on (N, n) arrays of cone points. Values and
Jacobians are cached per point set, so brackets sharing an operand reuse its
evaluations.
"""

import logging
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Tuple

import jax
import jax.numpy as jnp
import numpy as np

from ..errors import ValidationError
from ..geometry.connection import batched_curvature_derivative
from ..geometry.core import batched_metric_tensor
from ..kernels.base import MetricKernel
from ..models import DEFAULT_TOLERANCES

logger = logging.getLogger(__name__)

PointKey = Tuple[Tuple[int, ...], bytes]
JetsFn = Callable[[np.ndarray, int], List[np.ndarray]]

# derivative axes in jet einsums; s, i and a are taken
_AXES = "bcdefghjklmnopqrtuvwxyz"


def _key(points: np.ndarray) -> PointKey:
    points = np.ascontiguousarray(points, dtype=float)
    return points.shape, points.tobytes()


def _format_vector(v: np.ndarray) -> str:
    v = np.asarray(v, dtype=float)
    nonzero = np.flatnonzero(v)
    if nonzero.size == 1 and v[nonzero[0]] == 1.0:
        return f"e{nonzero[0] + 1}"
    return "(" + ",".join(f"{c:g}" for c in v) + ")"


class IndicatrixField:
    """A vector field y -> xi(y) on the cone over a fixed base point.

    ``fn`` is set when the field is a jax-traceable single-point function; such
    fields bracket exactly by composition. ``jets_fn(points, order)`` returns the
    values and y-derivatives up to ``order`` at every point; fields carrying it
    bracket exactly through the Leibniz rule. Anything else brackets through
    finite-difference Jacobians.
    """

    def __init__(
        self,
        base_x,
        label: str,
        values_fn: Callable[[np.ndarray], np.ndarray],
        jacobian_fn: Callable[[np.ndarray], np.ndarray],
        depth: int = 1,
        fn: Optional[Callable] = None,
        kernel: Optional[MetricKernel] = None,
        jets_fn: Optional[JetsFn] = None,
    ):
        self.base_x = np.asarray(base_x, dtype=float)
        self.label = label
        self.depth = depth
        self.fn = fn
        self.kernel = kernel
        self._values_fn = values_fn
        self._jacobian_fn = jacobian_fn
        self._jets_fn = jets_fn
        self._values: Dict[PointKey, np.ndarray] = {}
        self._jacobians: Dict[PointKey, np.ndarray] = {}
        self._jets: Dict[PointKey, List[np.ndarray]] = {}

    def values(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        key = _key(points)
        if key not in self._values:
            self._values[key] = np.asarray(self._values_fn(points), dtype=float)
        return self._values[key]

    def jacobian(self, points: np.ndarray) -> np.ndarray:
        """J[s, i, j] = d xi^i / d y^j at each point."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        key = _key(points)
        if key not in self._jacobians:
            self._jacobians[key] = np.asarray(self._jacobian_fn(points), dtype=float)
        return self._jacobians[key]

    def jets(self, points: np.ndarray, order: int) -> List[np.ndarray]:
        """[xi, D xi, ..., D^order xi]; entry k has shape (N, n) plus k derivative axes."""
        if self._jets_fn is None:
            raise ValidationError(f"Field {self.label} carries no exact y-derivatives")
        points = np.atleast_2d(np.asarray(points, dtype=float))
        key = _key(points)
        cached = self._jets.get(key)
        if cached is None or len(cached) <= order:
            cached = [np.asarray(d, dtype=float) for d in self._jets_fn(points, order)]
            self._jets[key] = cached
        return cached[: order + 1]

    def __call__(self, y) -> np.ndarray:
        return self.values(np.asarray(y, dtype=float)[None, :])[0]

    @property
    def exact(self) -> bool:
        return self.fn is not None

    @property
    def has_jets(self) -> bool:
        return self._jets_fn is not None

    def scaled(self, factor: float, label: Optional[str] = None) -> "IndicatrixField":
        fn = None
        if self.fn is not None:
            inner = self.fn
            fn = lambda y: factor * inner(y)  # noqa: E731
        jets_fn = None
        if self._jets_fn is not None:
            jets_fn = lambda p, order: [factor * d for d in self.jets(p, order)]  # noqa: E731
        return IndicatrixField(
            self.base_x,
            label or f"{factor:g}*{self.label}",
            lambda p: factor * self.values(p),
            lambda p: factor * self.jacobian(p),
            depth=self.depth,
            fn=fn,
            kernel=self.kernel,
            jets_fn=jets_fn,
        )

    def __repr__(self) -> str:
        return f"IndicatrixField({self.label!r}, depth={self.depth})"


def traceable_field(
    fn: Callable,
    base_x,
    label: str,
    depth: int = 1,
    kernel: Optional[MetricKernel] = None,
) -> IndicatrixField:
    """Field from a jax-traceable y -> xi(y); Jacobians are exact."""
    values = jax.jit(jax.vmap(fn))
    jacobian = jax.jit(jax.vmap(jax.jacfwd(fn)))
    derivatives = [values, jacobian]

    def jets(points, order):
        while len(derivatives) <= order:
            nested = fn
            for _ in range(len(derivatives)):
                nested = jax.jacfwd(nested)
            derivatives.append(jax.jit(jax.vmap(nested)))
        return [d(points) for d in derivatives[: order + 1]]

    return IndicatrixField(
        base_x, label, values, jacobian, depth=depth, fn=fn, kernel=kernel, jets_fn=jets
    )


def linear_field(matrix, base_x=None, label: str = "linear") -> IndicatrixField:
    M = jnp.asarray(np.asarray(matrix, dtype=float))
    base = np.zeros(M.shape[0]) if base_x is None else base_x
    return traceable_field(lambda y: M @ y, base, label)


def rotation_generator(j: int, k: int, dim: int, base_x=None) -> IndicatrixField:
    """L_jk(y) = e_j y_k - e_k y_j (0-based j, k) on Euclidean space."""
    M = np.zeros((dim, dim))
    M[j, k] = 1.0
    M[k, j] = -1.0
    return linear_field(M, base_x, label=f"L{j + 1}{k + 1}")


class CurvatureEvaluator:
    """Caches R and its y-derivatives of one kernel at one base point, per point set."""

    def __init__(self, kernel: MetricKernel, x):
        self.kernel = kernel
        self.x = np.asarray(x, dtype=float)
        self._derivatives: Dict[Tuple[PointKey, int], np.ndarray] = {}

    def derivative(self, points: np.ndarray, order: int) -> np.ndarray:
        """D[s, k, i, j, m1, ..., m_order] at each point."""
        key = (_key(points), order)
        if key not in self._derivatives:
            batched = batched_curvature_derivative(self.kernel, order)
            self._derivatives[key] = np.asarray(batched(self.x, points))
        return self._derivatives[key]

    def curvature(self, points: np.ndarray) -> np.ndarray:
        return self.derivative(points, 0)

    def curvature_jacobian(self, points: np.ndarray) -> np.ndarray:
        return self.derivative(points, 1)


_EVALUATORS: Dict[Tuple[int, bytes], CurvatureEvaluator] = {}


def curvature_evaluator(kernel: MetricKernel, x) -> CurvatureEvaluator:
    x = np.asarray(x, dtype=float)
    key = (id(kernel), x.tobytes())
    evaluator = _EVALUATORS.get(key)
    if evaluator is None or evaluator.kernel is not kernel:
        evaluator = CurvatureEvaluator(kernel, x)
        _EVALUATORS[key] = evaluator
    return evaluator


def curvature_field(kernel: MetricKernel, x, X, Y) -> IndicatrixField:
    """r_x(X, Y)(y)^k = R^k_ij(x, y) X^i Y^j."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape != (kernel.dim,) or Y.shape != (kernel.dim,):
        raise ValidationError(f"Curvature field directions must be {kernel.dim}-vectors")
    evaluator = curvature_evaluator(kernel, x)

    def values(points):
        return np.einsum("skij,i,j->sk", evaluator.curvature(points), X, Y)

    def jacobian(points):
        return np.einsum("skijm,i,j->skm", evaluator.curvature_jacobian(points), X, Y)

    def jets(points, order):
        return [
            np.einsum("skij...,i,j->sk...", evaluator.derivative(points, k), X, Y)
            for k in range(order + 1)
        ]

    label = f"r({_format_vector(X)},{_format_vector(Y)})"
    return IndicatrixField(x, label, values, jacobian, depth=1, kernel=kernel, jets_fn=jets)


def fd_jacobian(
    values_fn: Callable[[np.ndarray], np.ndarray],
    points: np.ndarray,
    step: float = DEFAULT_TOLERANCES.bracket_fd_step,
) -> np.ndarray:
    """Central differences with one Richardson step, step scaled by |y| per point."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    count, dim = points.shape
    h = step * np.linalg.norm(points, axis=1)
    jacobian = np.empty((count, dim, dim))
    for j in range(dim):
        shift = np.zeros(dim)
        shift[j] = 1.0
        offsets = h[:, None] * shift[None, :]
        coarse = (values_fn(points + offsets) - values_fn(points - offsets)) / (2.0 * h[:, None])
        half = 0.5 * offsets
        fine = (values_fn(points + half) - values_fn(points - half)) / h[:, None]
        jacobian[:, :, j] = (4.0 * fine - coarse) / 3.0
    return jacobian


def pushed_jets(u: List[np.ndarray], v: List[np.ndarray], order: int) -> List[np.ndarray]:
    """Jets up to ``order`` of y -> (Du)(y) v(y), from jets of u and v one order higher.

    By Leibniz, D^p[(Du) v] over derivative axes B sums (D^{|S|+1} u)_S (D^{p-|S|} v)_{B-S}
    over every subset S of B.
    """
    out = []
    for p in range(order + 1):
        axes = _AXES[:p]
        total = np.zeros(u[0].shape + (u[0].shape[1],) * p)
        for mask in range(1 << p):
            inner = "".join(c for b, c in enumerate(axes) if mask >> b & 1)
            outer = "".join(c for b, c in enumerate(axes) if not mask >> b & 1)
            total += np.einsum(
                f"sia{inner},sa{outer}->si{axes}", u[len(inner) + 1], v[len(outer)]
            )
        out.append(total)
    return out


def lie_bracket(
    f1: IndicatrixField,
    f2: IndicatrixField,
    step: float = DEFAULT_TOLERANCES.bracket_fd_step,
) -> IndicatrixField:
    """Usual bracket [f1, f2] = (d f2/dy) f1 - (d f1/dy) f2."""
    if f1.base_x.shape != f2.base_x.shape or np.any(f1.base_x != f2.base_x):
        raise ValidationError(
            f"Cannot bracket fields at different base points: {f1.label} and {f2.label}"
        )
    label = f"[{f1.label},{f2.label}]"
    depth = f1.depth + f2.depth
    kernel = f1.kernel or f2.kernel

    if f1.exact and f2.exact:
        g1, g2 = f1.fn, f2.fn

        def bracket(y):
            return jax.jvp(g2, (y,), (g1(y),))[1] - jax.jvp(g1, (y,), (g2(y),))[1]

        return traceable_field(bracket, f1.base_x, label, depth=depth, kernel=kernel)

    if f1.has_jets and f2.has_jets:

        def jets(points, order):
            j1 = f1.jets(points, order + 1)
            j2 = f2.jets(points, order + 1)
            return [a - b for a, b in zip(pushed_jets(j2, j1, order), pushed_jets(j1, j2, order))]

        exact = IndicatrixField(
            f1.base_x, label, lambda p: None, lambda p: None, depth=depth, kernel=kernel, jets_fn=jets
        )
        exact._values_fn = lambda points: exact.jets(points, 0)[0]
        exact._jacobian_fn = lambda points: exact.jets(points, 1)[1]
        return exact

    def values(points):
        return np.einsum("sij,sj->si", f2.jacobian(points), f1.values(points)) - np.einsum(
            "sij,sj->si", f1.jacobian(points), f2.values(points)
        )

    field = IndicatrixField(f1.base_x, label, values, lambda p: None, depth=depth, kernel=kernel)
    field._jacobian_fn = lambda points: fd_jacobian(field.values, points, step)
    return field


def tangency_defects(kernel: MetricKernel, field: IndicatrixField, points: np.ndarray) -> np.ndarray:
    """|g_y(y, xi)| / (|g_y y| |xi|) per point; zero for tangent or vanishing fields."""
    g = np.asarray(batched_metric_tensor(kernel)(field.base_x, points))
    g = 0.5 * (g + np.transpose(g, (0, 2, 1)))
    y_low = np.einsum("sij,sj->si", g, points)
    xi = field.values(points)
    scale = np.linalg.norm(y_low, axis=1) * np.linalg.norm(xi, axis=1)
    inner = np.abs(np.einsum("si,si->s", y_low, xi))
    return np.where(scale > 0, inner / np.where(scale > 0, scale, 1.0), 0.0)


def jacobian_consistency(field: IndicatrixField, points: np.ndarray, step: float = 1e-5) -> float:
    """Max relative gap between the field's Jacobian and a fresh finite-difference one."""
    provided = field.jacobian(points)
    estimated = fd_jacobian(field._values_fn, points, step)
    scale = max(float(np.max(np.abs(provided))), np.finfo(float).tiny)
    return float(np.max(np.abs(provided - estimated)) / scale)


@lru_cache(maxsize=None)
def unit_vector(dim: int, index: int) -> np.ndarray:
    e = np.zeros(dim)
    e[index] = 1.0
    e.setflags(write=False)
    return e


def curvature_generators(kernel: MetricKernel, x) -> list:
    """All r_x(e_i, e_j), i < j."""
    n = kernel.dim
    return [
        curvature_field(kernel, x, unit_vector(n, i), unit_vector(n, j))
        for i in range(n)
        for j in range(i + 1, n)
    ]


def constant_curvature_field(c: float, A, g_provider, y) -> np.ndarray:
    """2c A^{ik} y_k with y_k = g_km(y) y^m, for an antisymmetric bivector A.

    ``g_provider`` maps y to the fundamental tensor at y.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or not np.allclose(A, -A.T, rtol=0.0, atol=1e-14):
        raise ValidationError("Bivector coefficients must form an antisymmetric square matrix")
    y = np.asarray(y, dtype=float)
    y_low = np.asarray(g_provider(y), dtype=float) @ y
    return 2.0 * c * (A @ y_low)


def wedge(j: int, k: int, dim: int) -> np.ndarray:
    """Coefficients of e_j ^ e_k (0-based): A^{jk} = 1, A^{kj} = -1."""
    A = np.zeros((dim, dim))
    A[j, k] = 1.0
    A[k, j] = -1.0
    return A
