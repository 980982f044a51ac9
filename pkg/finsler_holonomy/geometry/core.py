"""Metric evaluation, fundamental tensor, homogeneity checks and indicatrix sampling."""

import logging
import math
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

import jax
import jax.numpy as jnp
import numpy as np
from scipy.stats import norm, qmc

from ..errors import (
    DegenerateMetricError,
    DomainError,
    NonPositiveValueError,
    SamplingCoverageError,
    SelfConsistencyError,
    ValidationError,
)
from ..kernels.base import MetricKernel
from ..models import (
    DEFAULT_TOLERANCES,
    AxiomReport,
    HomogeneityReport,
    IndicatrixSampleSet,
    TangentSample,
    Tolerances,
)
from .oracle import DerivativeOracle

logger = logging.getLogger(__name__)

MIN_ACCEPTANCE_RATE = 0.01
MAX_SOBOL_LOG2 = 16


@lru_cache(maxsize=None)
def metric_tensor_fn(kernel: MetricKernel) -> Callable:
    """Traceable (x, y) -> g_ij = 1/2 d^2F/dy^i dy^j (not symmetrized)."""
    hessian = jax.hessian(kernel.metric, argnums=1)

    def g(x, y):
        return 0.5 * hessian(x, y)

    return g


@lru_cache(maxsize=None)
def batched_metric(kernel: MetricKernel) -> Callable:
    return jax.jit(jax.vmap(kernel.metric, in_axes=(None, 0)))


@lru_cache(maxsize=None)
def batched_cone_margin(kernel: MetricKernel) -> Callable:
    return jax.jit(jax.vmap(kernel.cone_margin, in_axes=(None, 0)))


@lru_cache(maxsize=None)
def batched_metric_tensor(kernel: MetricKernel) -> Callable:
    return jax.jit(jax.vmap(metric_tensor_fn(kernel), in_axes=(None, 0)))


@lru_cache(maxsize=None)
def _jitted_metric_tensor(kernel: MetricKernel) -> Callable:
    return jax.jit(metric_tensor_fn(kernel))


def require_cone(kernel: MetricKernel, sample: TangentSample, margin: float = 0.0) -> None:
    if not kernel.cone_test(sample.x, sample.y, margin):
        raise DomainError(
            f"Sample outside the cone of '{kernel.name}': "
            f"x={sample.x.tolist()}, y={sample.y.tolist()}",
            x=sample.x,
            y=sample.y,
        )


def evaluate_metric(kernel: MetricKernel, sample: TangentSample) -> float:
    """F(x, y) at a cone sample."""
    require_cone(kernel, sample)
    return float(kernel.metric(jnp.asarray(sample.x), jnp.asarray(sample.y)))


def raw_fundamental_tensor(
    kernel: MetricKernel, sample: TangentSample, method: str = "exact"
) -> np.ndarray:
    """g before symmetrization; method 'fd' goes through the derivative oracle."""
    require_cone(kernel, sample)
    if method == "exact":
        return np.asarray(_jitted_metric_tensor(kernel)(sample.x, sample.y), dtype=float)
    oracle = DerivativeOracle(kernel, method=method)
    n = kernel.dim
    zero = [0] * n
    g = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            beta = [0] * n
            beta[i] += 1
            beta[j] += 1
            g[i, j] = 0.5 * oracle.partial(sample, zero, beta)
    return g


def check_nondegenerate(g: np.ndarray, tolerances: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Return the inverse of g, or raise if sigma_min <= tol_g_rel * sigma_max."""
    sigma = np.linalg.svd(g, compute_uv=False)
    if not np.all(np.isfinite(sigma)) or sigma[-1] <= tolerances.tol_g_rel * sigma[0]:
        raise DegenerateMetricError(
            f"Fundamental tensor is degenerate (sigma_min={sigma[-1]:.3e}, sigma_max={sigma[0]:.3e})",
            sigma_min=float(sigma[-1]),
            sigma_max=float(sigma[0]),
        )
    g_inv = np.linalg.inv(g)
    defect = float(np.max(np.abs(g @ g_inv - np.eye(g.shape[0]))))
    if defect > tolerances.tol_inv:
        raise DegenerateMetricError(
            f"Inverse of the fundamental tensor is inaccurate (defect {defect:.3e})",
            sigma_min=float(sigma[-1]),
            sigma_max=float(sigma[0]),
        )
    return g_inv


def fundamental_tensor(
    kernel: MetricKernel,
    sample: TangentSample,
    method: str = "exact",
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> Tuple[np.ndarray, np.ndarray]:
    """Symmetrized g_y and its inverse."""
    raw = raw_fundamental_tensor(kernel, sample, method)
    g = 0.5 * (raw + raw.T)
    return g, check_nondegenerate(g, tolerances)


def validate_homogeneity(
    kernel: MetricKernel,
    sample: TangentSample,
    lambdas: Sequence[float] = (0.5, 2.0, 3.0),
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> HomogeneityReport:
    """Deviation of F(x, l y) from l^2 F(x, y), plus the Euler identity g(y, y) = F."""
    base = evaluate_metric(kernel, sample)
    deviations = []
    for lam in lambdas:
        if lam <= 0 or not kernel.cone_test(sample.x, lam * sample.y):
            raise ValidationError(f"Scale {lam} is not admissible at y={sample.y.tolist()}")
        scaled = float(kernel.metric(jnp.asarray(sample.x), jnp.asarray(lam * sample.y)))
        expected = lam * lam * base
        deviations.append(abs(scaled - expected) / max(abs(expected), np.finfo(float).tiny))

    g = raw_fundamental_tensor(kernel, sample)
    euler = abs(float(sample.y @ g @ sample.y) - base) / max(abs(base), np.finfo(float).tiny)
    worst = max(deviations) if deviations else 0.0
    return HomogeneityReport(
        lambdas=[float(lam) for lam in lambdas],
        max_relative_deviation=worst,
        euler_deviation=euler,
        passed=worst <= tolerances.tol_hom and euler <= tolerances.tol_hom,
    )


def indicatrix_project(
    kernel: MetricKernel, sample: TangentSample, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> np.ndarray:
    """Radial projection y / sqrt(F(x, y)) onto the positive indicatrix."""
    value = evaluate_metric(kernel, sample)
    if not value > 0:
        raise NonPositiveValueError(
            f"F(x, y) = {value} is not positive at y={sample.y.tolist()}", value=value
        )
    projected = sample.y / math.sqrt(value)
    check = float(kernel.metric(jnp.asarray(sample.x), jnp.asarray(projected)))
    if abs(check - 1.0) > tolerances.tol_proj:
        raise SelfConsistencyError(
            f"Projection missed the indicatrix by {abs(check - 1.0):.3e}",
            defect=abs(check - 1.0),
            tolerance=tolerances.tol_proj,
        )
    return projected


def sample_indicatrix(
    kernel: MetricKernel,
    x,
    count: int,
    seed: int,
    margin: Optional[float] = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> IndicatrixSampleSet:
    """Seeded low-discrepancy directions, cone-filtered and projected to F = 1."""
    if count < 1:
        raise ValidationError(f"Sample count must be at least 1, got {count}")
    x = np.asarray(x, dtype=float)
    if x.shape != (kernel.dim,):
        raise ValidationError(f"Base point must be a {kernel.dim}-vector, got shape {x.shape}")
    margin = tolerances.cone_margin if margin is None else margin
    n = kernel.dim

    log2 = max(6, math.ceil(math.log2(4 * count)))
    while True:
        sampler = qmc.Sobol(d=n, scramble=True, seed=seed)
        uniform = sampler.random_base2(log2)
        gaussian = norm.ppf(np.clip(uniform, 1e-12, 1.0 - 1e-12))
        lengths = np.linalg.norm(gaussian, axis=1)
        directions = gaussian[lengths > 0] / lengths[lengths > 0, None]
        margins = np.asarray(batched_cone_margin(kernel)(x, directions))
        accepted = directions[np.isfinite(margins) & (margins > margin)]
        rate = accepted.shape[0] / max(directions.shape[0], 1)
        logger.debug(
            f"Sobol draw 2^{log2} for '{kernel.name}': accepted {accepted.shape[0]} (rate {rate:.3f})"
        )
        if directions.shape[0] >= 1024 and rate < MIN_ACCEPTANCE_RATE:
            raise SamplingCoverageError(
                f"Cone of '{kernel.name}' at x={x.tolist()} is too thin for sampling "
                f"(acceptance {rate:.4f} < {MIN_ACCEPTANCE_RATE})",
                acceptance_rate=rate,
                accepted=int(accepted.shape[0]),
                requested=count,
            )
        if accepted.shape[0] >= count:
            break
        if log2 >= MAX_SOBOL_LOG2:
            raise SamplingCoverageError(
                f"Only {accepted.shape[0]} of {count} samples found in the cone of '{kernel.name}'",
                acceptance_rate=rate,
                accepted=int(accepted.shape[0]),
                requested=count,
            )
        log2 += 1

    chosen = accepted[:count]
    values = np.asarray(batched_metric(kernel)(x, chosen))
    if not np.all(values > 0):
        bad = int(np.argmin(values))
        raise NonPositiveValueError(
            f"F <= 0 at sampled direction {chosen[bad].tolist()}", value=float(values[bad])
        )
    points = chosen / np.sqrt(values)[:, None]
    drift = np.max(np.abs(np.asarray(batched_metric(kernel)(x, points)) - 1.0))
    if drift > tolerances.tol_proj:
        raise SelfConsistencyError(
            f"Sampled points miss the indicatrix by {drift:.3e}",
            defect=float(drift),
            tolerance=tolerances.tol_proj,
        )
    return IndicatrixSampleSet(x=x, points=points, seed=seed, margin=margin, acceptance_rate=rate)


def validate_minkowski_axioms(
    kernel: MetricKernel,
    samples: IndicatrixSampleSet,
    lambdas: Sequence[float] = (0.5, 2.0, 3.0),
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> AxiomReport:
    """Homogeneity, Euler identity, symmetry, nondegeneracy and claimed definiteness."""
    x = samples.x
    points = samples.points
    metric = batched_metric(kernel)
    base = np.asarray(metric(x, points))
    homogeneity = 0.0
    for lam in lambdas:
        scaled = np.asarray(metric(x, lam * points))
        homogeneity = max(
            homogeneity, float(np.max(np.abs(scaled - lam * lam * base) / np.abs(lam * lam * base)))
        )

    tensors = np.asarray(batched_metric_tensor(kernel)(x, points))
    euler = float(np.max(np.abs(np.einsum("si,sij,sj->s", points, tensors, points) - base) / np.abs(base)))
    asymmetry = float(np.max(np.abs(tensors - np.transpose(tensors, (0, 2, 1)))))
    symmetric = 0.5 * (tensors + np.transpose(tensors, (0, 2, 1)))
    sigma = np.linalg.svd(symmetric, compute_uv=False)
    sigma_ratio = float(np.min(sigma[:, -1] / sigma[:, 0]))

    violations = 0
    if kernel.positive_definite_claim:
        violations = int(np.sum(np.linalg.eigvalsh(symmetric)[:, 0] <= 0))

    passed = (
        homogeneity <= tolerances.tol_hom
        and euler <= tolerances.tol_hom
        and sigma_ratio > tolerances.tol_g_rel
        and violations == 0
    )
    logger.info(
        f"Axioms for '{kernel.name}' on {samples.count} samples: "
        f"homogeneity {homogeneity:.2e}, euler {euler:.2e}, sigma ratio {sigma_ratio:.2e}"
    )
    return AxiomReport(
        samples_checked=samples.count,
        max_homogeneity_deviation=homogeneity,
        max_euler_deviation=euler,
        max_asymmetry=asymmetry,
        min_sigma_ratio=sigma_ratio,
        positive_definite_claim=kernel.positive_definite_claim,
        positive_definite_violations=violations,
        passed=passed,
    )
