"""Spray, nonlinear connection, curvature, constant-curvature fit and semi-Riemannian test."""

import logging
from functools import lru_cache
from typing import Callable

import jax
import jax.numpy as jnp
import numpy as np

from ..errors import ConfigurationError, SelfConsistencyError
from ..kernels.base import MetricKernel
from ..models import (
    DEFAULT_TOLERANCES,
    ConnectionData,
    ConnectionSummary,
    CurvatureFitReport,
    IndicatrixSampleSet,
    RiemannianPointReport,
    TangentSample,
    Tolerances,
)
from .core import batched_metric_tensor, fundamental_tensor, metric_tensor_fn, require_cone

logger = logging.getLogger(__name__)

# The constant-curvature pattern is this constant times
# (delta^k_i y_j - delta^k_j y_i), so the round sphere fits c = +1.
CURVATURE_SIGN_CONVENTION = -1.0

MIN_FIT_SAMPLES = 10


@lru_cache(maxsize=None)
def spray_fn(kernel: MetricKernel) -> Callable:
    """Traceable G^i = 1/4 g^il (2 dg_jl/dx^k - dg_jk/dx^l) y^j y^k."""
    g_fn = metric_tensor_fn(kernel)
    dg_dx = jax.jacfwd(g_fn, argnums=0)

    def spray(x, y):
        g = g_fn(x, y)
        g = 0.5 * (g + g.T)
        dg = dg_dx(x, y)  # dg[j, l, k] = d g_jl / d x^k
        dg = 0.5 * (dg + jnp.transpose(dg, (1, 0, 2)))
        first = jnp.einsum("jlk,j,k->l", dg, y, y)
        second = jnp.einsum("jkl,j,k->l", dg, y, y)
        return 0.25 * jnp.linalg.solve(g, 2.0 * first - second)

    return spray


@lru_cache(maxsize=None)
def connection_fn(kernel: MetricKernel) -> Callable:
    """Traceable Gamma[i, j] = dG^i / dy^j."""
    return jax.jacfwd(spray_fn(kernel), argnums=1)


@lru_cache(maxsize=None)
def raw_curvature_fn(kernel: MetricKernel) -> Callable:
    """Traceable R[k, i, j] from the local coordinate formula (before antisymmetrization)."""
    gamma = connection_fn(kernel)
    d_gamma_dx = jax.jacfwd(gamma, argnums=0)
    d_gamma_dy = jax.jacfwd(gamma, argnums=1)

    def curvature(x, y):
        Gam = gamma(x, y)
        Dx = d_gamma_dx(x, y)  # Dx[k, i, j] = d Gamma^k_i / dx^j
        Dy = d_gamma_dy(x, y)  # Dy[k, j, m] = d Gamma^k_j / dy^m
        return (
            Dx
            - jnp.transpose(Dx, (0, 2, 1))
            + jnp.einsum("mi,kjm->kij", Gam, Dy)
            - jnp.einsum("mj,kim->kij", Gam, Dy)
        )

    return curvature


@lru_cache(maxsize=None)
def curvature_fn(kernel: MetricKernel) -> Callable:
    """Traceable antisymmetrized curvature."""
    raw = raw_curvature_fn(kernel)

    def curvature(x, y):
        R = raw(x, y)
        return 0.5 * (R - jnp.transpose(R, (0, 2, 1)))

    return curvature


@lru_cache(maxsize=None)
def _jitted(kernel: MetricKernel, which: str) -> Callable:
    builders = {
        "spray": spray_fn,
        "connection": connection_fn,
        "raw_curvature": raw_curvature_fn,
    }
    return jax.jit(builders[which](kernel))


@lru_cache(maxsize=None)
def batched_curvature(kernel: MetricKernel) -> Callable:
    return batched_curvature_derivative(kernel, 0)


@lru_cache(maxsize=None)
def batched_curvature_jacobian(kernel: MetricKernel) -> Callable:
    """J[s, k, i, j, m] = d R^k_ij / dy^m at each point."""
    return batched_curvature_derivative(kernel, 1)


@lru_cache(maxsize=None)
def batched_curvature_derivative(kernel: MetricKernel, order: int) -> Callable:
    """D[s, k, i, j, m1, ..., m_order] = d^order R^k_ij / dy^m1 ... dy^m_order."""
    fn = curvature_fn(kernel)
    for _ in range(order):
        fn = jax.jacfwd(fn, argnums=1)
    return jax.jit(jax.vmap(fn, in_axes=(None, 0)))


def tangency_defect(g: np.ndarray, y: np.ndarray, R: np.ndarray) -> float:
    """max over (i, j) of |g_y(y, R_ij)| / |y|; zero when R is tangent to the indicatrix."""
    y_low = g @ y
    return float(np.max(np.abs(np.einsum("k,kij->ij", y_low, R))) / np.linalg.norm(y))


def spray(
    kernel: MetricKernel, sample: TangentSample, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> np.ndarray:
    """Spray coefficients G^i(x, y)."""
    fundamental_tensor(kernel, sample, tolerances=tolerances)
    return np.asarray(_jitted(kernel, "spray")(sample.x, sample.y), dtype=float)


def nonlinear_connection(
    kernel: MetricKernel, sample: TangentSample, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> np.ndarray:
    """Gamma^i_j(x, y), positively homogeneous of degree one in y."""
    fundamental_tensor(kernel, sample, tolerances=tolerances)
    return np.asarray(_jitted(kernel, "connection")(sample.x, sample.y), dtype=float)


def connection_data(
    kernel: MetricKernel,
    sample: TangentSample,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    check_tangency: bool = True,
) -> ConnectionData:
    """g, g^-1, G, Gamma and the antisymmetrized curvature at one sample."""
    require_cone(kernel, sample, tolerances.cone_margin)
    g, g_inv = fundamental_tensor(kernel, sample, tolerances=tolerances)
    G = np.asarray(_jitted(kernel, "spray")(sample.x, sample.y), dtype=float)
    Gamma = np.asarray(_jitted(kernel, "connection")(sample.x, sample.y), dtype=float)
    raw = np.asarray(_jitted(kernel, "raw_curvature")(sample.x, sample.y), dtype=float)
    R = 0.5 * (raw - np.transpose(raw, (0, 2, 1)))
    asymmetry = float(np.max(np.abs(raw + np.transpose(raw, (0, 2, 1)))))
    defect = tangency_defect(g, sample.y, R)
    if check_tangency and defect > tolerances.tol_tan:
        raise SelfConsistencyError(
            f"Curvature of '{kernel.name}' is not tangent to the indicatrix "
            f"at y={sample.y.tolist()} (defect {defect:.3e})",
            defect=defect,
            tolerance=tolerances.tol_tan,
        )
    return ConnectionData(
        sample=sample,
        g=g,
        g_inv=g_inv,
        G=G,
        Gamma=Gamma,
        R=R,
        raw_asymmetry=asymmetry,
        tangency_defect=defect,
    )


def curvature(
    kernel: MetricKernel, sample: TangentSample, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> np.ndarray:
    """R[k, i, j] = R^k_ij(x, y), antisymmetric in (i, j)."""
    return connection_data(kernel, sample, tolerances).R


def constant_curvature_pattern(g: np.ndarray, y: np.ndarray) -> np.ndarray:
    """P[k, i, j] for the constant-curvature form, including the sign convention."""
    n = y.shape[0]
    y_low = g @ y
    delta = np.eye(n)
    form = np.einsum("ki,j->kij", delta, y_low) - np.einsum("kj,i->kij", delta, y_low)
    return CURVATURE_SIGN_CONVENTION * form


def constant_curvature_fit(
    kernel: MetricKernel,
    x,
    samples: IndicatrixSampleSet,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> CurvatureFitReport:
    """Least-squares c with R ~ c P over all samples and index triples."""
    if samples.count < MIN_FIT_SAMPLES:
        raise ConfigurationError(
            f"Constant-curvature fit needs at least {MIN_FIT_SAMPLES} samples, got {samples.count}"
        )
    x = np.asarray(x, dtype=float)
    points = samples.points
    R = np.asarray(batched_curvature(kernel)(x, points))
    g = np.asarray(batched_metric_tensor(kernel)(x, points))
    g = 0.5 * (g + np.transpose(g, (0, 2, 1)))
    P = np.stack([constant_curvature_pattern(gs, ys) for gs, ys in zip(g, points)])

    denominator = float(np.sum(P * P))
    c = float(np.sum(R * P)) / denominator if denominator > 0 else 0.0

    residual = 0.0
    per_sample = []
    for Rs, Ps in zip(R, P):
        scale = max(np.linalg.norm(Rs), abs(c) * np.linalg.norm(Ps))
        if scale > 0:
            residual = max(residual, float(np.linalg.norm(Rs - c * Ps) / scale))
        pp = float(np.sum(Ps * Ps))
        if pp > 0:
            per_sample.append(float(np.sum(Rs * Ps)) / pp)
    spread = float(np.max(per_sample) - np.min(per_sample)) if per_sample else 0.0

    logger.info(
        f"Constant-curvature fit for '{kernel.name}': c={c:.10g}, residual={residual:.3e}"
    )
    return CurvatureFitReport(
        c_estimate=c,
        residual=residual,
        samples_used=samples.count,
        per_sample_spread=spread,
        sign_convention=CURVATURE_SIGN_CONVENTION,
    )


def riemannian_point_test(
    kernel: MetricKernel,
    x,
    samples: IndicatrixSampleSet,
    tol: float = DEFAULT_TOLERANCES.tol_semi_riemannian,
) -> RiemannianPointReport:
    """Semi-Riemannian at x iff g_y does not depend on y (max pairwise relative change)."""
    if samples.count < MIN_FIT_SAMPLES:
        raise ConfigurationError(
            f"Semi-Riemannian test needs at least {MIN_FIT_SAMPLES} samples, got {samples.count}"
        )
    x = np.asarray(x, dtype=float)
    g = np.asarray(batched_metric_tensor(kernel)(x, samples.points))
    g = 0.5 * (g + np.transpose(g, (0, 2, 1)))
    norms = np.linalg.norm(g, axis=(1, 2))
    differences = np.linalg.norm(g[:, None, :, :] - g[None, :, :, :], axis=(2, 3))
    deviation = float(np.max(differences / norms[:, None]))
    return RiemannianPointReport(
        is_semi_riemannian=deviation <= tol,
        deviation=deviation,
        tolerance=tol,
        samples_used=samples.count,
    )


def connection_summary(data: ConnectionData) -> ConnectionSummary:
    return ConnectionSummary(
        y=data.sample.y.tolist(),
        spray=data.G.tolist(),
        max_abs_gamma=float(np.max(np.abs(data.Gamma))),
        max_abs_curvature=float(np.max(np.abs(data.R))),
        raw_asymmetry=data.raw_asymmetry,
        tangency_defect=data.tangency_defect,
        fundamental_tensor=data.g.tolist(),
    )
