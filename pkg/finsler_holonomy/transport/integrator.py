"""Parallel transport by fixed-step RK4, holonomy tabulation and commutator loops.

A vector field X(t) along c(t) is parallel when dX^i/dt = -Gamma^i_j(c(t), X) dc^j/dt.
Each curve piece is integrated over its own parameter interval [0, 1] with the
same number of steps, inside one jitted ``lax.fori_loop`` vmapped over samples.
"""

import logging
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import jax
import jax.numpy as jnp
import numpy as np

from ..errors import (
    CommutatorStepError,
    CompositionError,
    ConfigurationError,
    DomainError,
    NonPositiveValueError,
    SelfConsistencyError,
    TransportDomainError,
)
from ..geometry.connection import connection_fn
from ..geometry.core import batched_metric
from ..kernels.base import MetricKernel
from ..models import (
    DEFAULT_TOLERANCES,
    CurveSpec,
    HolonomyElement,
    IndicatrixSampleSet,
    TabulatedField,
    Tolerances,
)
from .curves import (
    CONTINUITY_TOL,
    concatenate,
    curve_end,
    curve_start,
    is_closed,
    parallelogram_loop,
    square_loop,
    validate_curve,
)

logger = logging.getLogger(__name__)

MIN_STEPS = 4


def _segment_path(params, tau):
    start, end = params
    return start + tau * (end - start), end - start


def _arc_path(params, tau):
    center, u, v, radius, phi0, phi1 = params
    phi = phi0 + tau * (phi1 - phi0)
    position = center + radius * (jnp.cos(phi) * u + jnp.sin(phi) * v)
    velocity = radius * (phi1 - phi0) * (-jnp.sin(phi) * u + jnp.cos(phi) * v)
    return position, velocity


_PATHS = {"segment": _segment_path, "arc": _arc_path}


def _piece_params(piece) -> Tuple:
    if piece.kind == "segment":
        return (jnp.asarray(piece.start, dtype=float), jnp.asarray(piece.end, dtype=float))
    return (
        jnp.asarray(piece.center, dtype=float),
        jnp.asarray(piece.u, dtype=float),
        jnp.asarray(piece.v, dtype=float),
        jnp.asarray(piece.radius, dtype=float),
        jnp.asarray(piece.phi0, dtype=float),
        jnp.asarray(piece.phi1, dtype=float),
    )


@lru_cache(maxsize=None)
def _piece_integrator(kernel: MetricKernel, kind: str) -> Callable:
    gamma = connection_fn(kernel)
    path = _PATHS[kind]

    def rhs(params, tau, X):
        position, velocity = path(params, tau)
        return -gamma(position, X) @ velocity

    def integrate(params, y0, steps):
        h = 1.0 / steps

        def body(i, carry):
            X, exit_tau = carry
            tau = i * h
            k1 = rhs(params, tau, X)
            k2 = rhs(params, tau + 0.5 * h, X + 0.5 * h * k1)
            k3 = rhs(params, tau + 0.5 * h, X + 0.5 * h * k2)
            k4 = rhs(params, tau + h, X + h * k3)
            X_next = X + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            position, _ = path(params, tau + h)
            outside = jnp.logical_not(kernel.cone_margin(position, X_next) > 0)
            exit_tau = jnp.where(outside & jnp.isinf(exit_tau), tau + h, exit_tau)
            return X_next, exit_tau

        return jax.lax.fori_loop(0, steps, body, (y0, jnp.asarray(jnp.inf, dtype=y0.dtype)))

    return jax.jit(jax.vmap(integrate, in_axes=(None, 0, None)), static_argnums=2)


def _check_steps(steps: int) -> None:
    if steps < MIN_STEPS:
        raise ConfigurationError(f"Transport needs at least {MIN_STEPS} RK4 steps, got {steps}")


def transport_batch(
    kernel: MetricKernel, curve: CurveSpec, ys: np.ndarray, steps: int
) -> np.ndarray:
    """Transport every row of ys along the curve; raises on the first cone exit."""
    _check_steps(steps)
    validate_curve(curve, kernel.dim)
    ys = np.atleast_2d(np.asarray(ys, dtype=float))
    if not curve.pieces:
        return ys.copy()

    start = curve_start(curve)
    for index, y in enumerate(ys):
        if not kernel.cone_test(start, y):
            raise DomainError(
                f"Initial vector {index} is outside the cone at the curve start", x=start, y=y
            )

    images = jnp.asarray(ys)
    count = len(curve.pieces)
    for p, piece in enumerate(curve.pieces):
        images, exits = _piece_integrator(kernel, piece.kind)(_piece_params(piece), images, steps)
        exits = np.asarray(exits)
        left = np.flatnonzero(np.isfinite(exits))
        if left.size:
            first = int(left[np.argmin(exits[left])])
            t_star = (p + float(exits[first])) / count
            raise TransportDomainError(
                f"Transport along '{curve.name}' left the cone at t*={t_star:.6f} (sample {first})",
                t_star=t_star,
                sample_index=first,
            )
    return np.asarray(images)


def transport(kernel: MetricKernel, curve: CurveSpec, y0, steps: int) -> np.ndarray:
    """Parallel transport of y0 along the curve with fixed-step RK4."""
    return transport_batch(kernel, curve, np.asarray(y0, dtype=float)[None, :], steps)[0]


def richardson_error(
    kernel: MetricKernel,
    curve: CurveSpec,
    ys: np.ndarray,
    steps: int,
    coarse: Optional[np.ndarray] = None,
) -> float:
    """Error estimate |X_2N - X_N| / 15 for the RK4 pair (N, 2N).

    ``coarse`` reuses images already transported with N steps.
    """
    if coarse is None:
        coarse = transport_batch(kernel, curve, ys, steps)
    fine = transport_batch(kernel, curve, ys, 2 * steps)
    return float(np.max(np.linalg.norm(fine - coarse, axis=-1)) / 15.0)


def metric_drift(kernel: MetricKernel, curve: CurveSpec, ys: np.ndarray, images: np.ndarray) -> np.ndarray:
    """|F(c(1), X(1)) - F(c(0), X(0))| per sample."""
    if not curve.pieces:
        return np.zeros(len(np.atleast_2d(ys)))
    metric = batched_metric(kernel)
    before = np.asarray(metric(curve_start(curve), np.atleast_2d(ys)))
    after = np.asarray(metric(curve_end(curve), np.atleast_2d(images)))
    return np.abs(after - before)


def drift_convergence(
    kernel: MetricKernel, curve: CurveSpec, y0, steps: Sequence[int]
) -> Dict[str, List[float]]:
    """F-drift under step refinement and the observed orders between consecutive counts."""
    ys = np.asarray(y0, dtype=float)[None, :]
    drifts = [float(metric_drift(kernel, curve, ys, transport_batch(kernel, curve, ys, n))[0]) for n in steps]
    orders = []
    for (n0, d0), (n1, d1) in zip(zip(steps, drifts), zip(steps[1:], drifts[1:])):
        orders.append(float(np.log(d0 / d1) / np.log(n1 / n0)) if d0 > 0 and d1 > 0 else float("inf"))
    return {"steps": [float(n) for n in steps], "drifts": drifts, "orders": orders}


def _reproject(kernel: MetricKernel, x: np.ndarray, images: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    values = np.asarray(batched_metric(kernel)(x, images))
    if not np.all(values > 0):
        bad = int(np.argmin(values))
        raise NonPositiveValueError(
            f"Transported sample {bad} has F = {values[bad]:.3e} <= 0", value=float(values[bad])
        )
    roots = np.sqrt(values)
    return images / roots[:, None], np.abs(roots - 1.0)


def _check_injective(domain: np.ndarray, images: np.ndarray) -> None:
    if len(images) < 2:
        return
    image_gaps = np.linalg.norm(images[:, None, :] - images[None, :, :], axis=-1)
    domain_gaps = np.linalg.norm(domain[:, None, :] - domain[None, :, :], axis=-1)
    distinct = domain_gaps > 0
    if np.any(distinct & (image_gaps == 0)):
        raise SelfConsistencyError(
            "Holonomy tabulation is not injective on the samples", defect=0.0, tolerance=0.0
        )


def loop_transport(
    kernel: MetricKernel,
    loop: CurveSpec,
    samples: IndicatrixSampleSet,
    steps: int,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    estimate_error: bool = False,
) -> HolonomyElement:
    """Transport every indicatrix sample around a closed loop and re-project onto F = 1."""
    _check_loop(kernel, loop, samples)
    raw = transport_batch(kernel, loop, samples.points, steps)
    error = richardson_error(kernel, loop, samples.points, steps, coarse=raw) if estimate_error else None
    return tabulate_holonomy(kernel, loop, samples, raw, steps, tolerances, error)


def _check_loop(kernel: MetricKernel, loop: CurveSpec, samples: IndicatrixSampleSet) -> None:
    validate_curve(loop, kernel.dim)
    if not is_closed(loop):
        raise ConfigurationError(f"Curve '{loop.name}' is not a closed loop")
    if loop.pieces and np.linalg.norm(curve_start(loop) - samples.x) > CONTINUITY_TOL:
        raise ConfigurationError(
            f"Loop '{loop.name}' starts at {curve_start(loop).tolist()}, samples live at {samples.x.tolist()}"
        )


def tabulate_holonomy(
    kernel: MetricKernel,
    loop: CurveSpec,
    samples: IndicatrixSampleSet,
    raw: np.ndarray,
    steps: int,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    error: Optional[float] = None,
) -> HolonomyElement:
    """Holonomy element from images already transported around the loop."""
    _check_loop(kernel, loop, samples)
    images, corrections = _reproject(kernel, samples.x, np.asarray(raw, dtype=float))
    worst = float(np.max(corrections)) if corrections.size else 0.0
    if worst > tolerances.tol_transport:
        logger.warning(f"Projection correction {worst:.3e} on '{loop.name}' exceeds {tolerances.tol_transport}")
    _check_injective(samples.points, images)

    logger.info(f"Holonomy of '{loop.name}' on {samples.count} samples, max correction {worst:.2e}")
    return HolonomyElement(
        base_x=np.asarray(samples.x, dtype=float),
        domain=samples,
        images=images,
        loop=loop,
        step_count=steps,
        projection_corrections=corrections,
        richardson_error=error,
    )


def identity_holonomy(samples: IndicatrixSampleSet) -> HolonomyElement:
    return HolonomyElement(
        base_x=np.asarray(samples.x, dtype=float),
        domain=samples,
        images=samples.points.copy(),
        loop=CurveSpec(name="constant", pieces=[]),
        step_count=0,
        projection_corrections=np.zeros(samples.count),
    )


def compose(
    h1: HolonomyElement,
    h2: HolonomyElement,
    kernel: Optional[MetricKernel] = None,
    match_tol: float = 1e-9,
) -> HolonomyElement:
    """h2 after h1, tabulated on h1's domain.

    When h2 was not tabulated on h1's images, the kernel is needed to re-evaluate
    h2 by fresh transport along its loop.
    """
    if h1.base_x.shape != h2.base_x.shape or np.linalg.norm(h1.base_x - h2.base_x) > CONTINUITY_TOL:
        raise CompositionError(
            f"Cannot compose holonomies at different base points {h1.base_x.tolist()} and {h2.base_x.tolist()}"
        )
    if h2.domain.points.shape == h1.images.shape and np.max(
        np.abs(h2.domain.points - h1.images), initial=0.0
    ) <= match_tol:
        images = h2.images.copy()
    elif kernel is not None:
        raw = transport_batch(kernel, h2.loop, h1.images, h2.step_count) if h2.loop.pieces else h1.images
        images, _ = _reproject(kernel, h1.base_x, raw)
    else:
        raise CompositionError(
            "Second holonomy is not tabulated on the images of the first; pass a kernel to re-evaluate"
        )
    return HolonomyElement(
        base_x=h1.base_x,
        domain=h1.domain,
        images=images,
        loop=concatenate(h1.loop, h2.loop),
        step_count=max(h1.step_count, h2.step_count),
    )


def holonomy_samples(
    kernel: MetricKernel,
    x,
    samples: IndicatrixSampleSet,
    sides: Sequence[float],
    steps: int,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> List[HolonomyElement]:
    """One holonomy element per coordinate-plane square and side length."""
    x = np.asarray(x, dtype=float)
    elements = []
    for i in range(kernel.dim):
        for j in range(i + 1, kernel.dim):
            for side in sides:
                loop = square_loop(x, (i, j), side)
                elements.append(loop_transport(kernel, loop, samples, steps, tolerances))
    return elements


def commutator_loop_derivative(
    kernel: MetricKernel,
    x,
    X,
    Y,
    t: float,
    samples: IndicatrixSampleSet,
    steps: int,
) -> TabulatedField:
    """(theta(y) - y) / t^2 for the loop x -> x+tX -> x+tX+tY -> x+tY -> x.

    With X, Y extended as constant (commuting) fields, the estimate tends to the
    curvature field r_x(X, Y) with error O(t).
    """
    loop = parallelogram_loop(x, X, Y, t, name=f"commutator(t={t})")
    try:
        images = transport_batch(kernel, loop, samples.points, steps)
    except TransportDomainError as e:
        raise CommutatorStepError(
            f"Commutator loop with t={t} leaves the cone (t*={e.t_star:.4f}); reduce t",
            t_star=e.t_star,
            sample_index=e.sample_index,
        )
    values = (images - samples.points) / (t * t)
    return TabulatedField(
        base_x=np.asarray(x, dtype=float),
        points=samples.points,
        values=values,
        label=f"commutator(X={list(map(float, X))}, Y={list(map(float, Y))}, t={t})",
    )


def reference_holonomy(kernel_name: str, curve_name: str) -> Optional[Callable[[np.ndarray], np.ndarray]]:
    """Closed-form holonomy where one is known: flat kernels and the sphere octant."""
    if kernel_name.startswith("euclidean"):
        return lambda ys: np.asarray(ys, dtype=float).copy()
    if kernel_name == "sphere" and curve_name == "octant":
        return octant_rotation
    return None


def octant_rotation(ys: np.ndarray) -> np.ndarray:
    """Rotation by pi/2 in the (x1, x2) plane, the holonomy of the geodesic octant."""
    ys = np.asarray(ys, dtype=float)
    rotated = ys.copy()
    rotated[..., 0] = -ys[..., 1]
    rotated[..., 1] = ys[..., 0]
    return rotated
