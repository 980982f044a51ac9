"""Curvature operators y -> R(X, Y)(y) as matrices and the matrix algebra they generate."""

import logging
from typing import List, Optional

import numpy as np

from ..geometry.core import require_cone, sample_indicatrix
from ..kernels.base import MetricKernel
from ..models import DEFAULT_TOLERANCES, OperatorAlgebraReport, TangentSample
from .fields import curvature_field, unit_vector
from .generation import numerical_rank

logger = logging.getLogger(__name__)


def curvature_operator(kernel: MetricKernel, x, X, Y, y) -> np.ndarray:
    """M[k, m] = d r_x(X, Y)^k / dy^m at y.

    The curvature field has degree one in y, so M y = r_x(X, Y)(y). For
    Riemannian kernels M does not depend on y.
    """
    sample = TangentSample.of(x, y)
    require_cone(kernel, sample)
    field = curvature_field(kernel, sample.x, X, Y)
    return field.jacobian(sample.y[None, :])[0]


def _flat_rank(matrices: List[np.ndarray], tol_rank: float):
    if not matrices:
        return 0, np.zeros(0)
    stacked = np.stack([m.reshape(-1) for m in matrices])
    norms = np.linalg.norm(stacked, axis=1)
    top = float(np.max(norms))
    if top == 0.0:
        return 0, np.zeros(len(matrices))
    live = norms > 1e-9 * top
    stacked = np.where(live[:, None], stacked / np.where(live, norms, 1.0)[:, None], 0.0)
    return numerical_rank(stacked, tol_rank)


def operator_algebra_rank(
    kernel: MetricKernel,
    x=None,
    max_depth: int = 3,
    y=None,
    seed: int = 7,
    tol_rank: float = DEFAULT_TOLERANCES.tol_rank,
) -> OperatorAlgebraReport:
    """Commutator closure of the curvature operators at a reference direction y."""
    n = kernel.dim
    x = kernel.default_point() if x is None else np.asarray(x, dtype=float)
    if y is None:
        y = sample_indicatrix(kernel, x, 1, seed, margin=kernel.sampling_margin or None).points[0]
    y = np.asarray(y, dtype=float)

    labels = []
    basis: List[np.ndarray] = []
    for i in range(n):
        for j in range(i + 1, n):
            labels.append(f"R(e{i + 1},e{j + 1})")
            basis.append(curvature_operator(kernel, x, unit_vector(n, i), unit_vector(n, j), y))

    generators = list(basis)
    rank, sigma = _flat_rank(basis, tol_rank)
    ranks = [rank]
    frontier: List[np.ndarray] = list(basis)
    for depth in range(2, max_depth + 1):
        added: List[np.ndarray] = []
        for A in generators:
            for B in frontier:
                C = A @ B - B @ A
                new_rank, new_sigma = _flat_rank(basis + added + [C], tol_rank)
                if new_rank > rank:
                    added.append(C)
                    rank, sigma = new_rank, new_sigma
        ranks.append(rank)
        logger.debug(f"Operator algebra depth {depth}: rank {rank}")
        if not added:
            ranks.extend([rank] * (max_depth - depth))
            break
        basis.extend(added)
        frontier = added

    return OperatorAlgebraReport(
        generators=labels,
        reference_y=y.tolist(),
        rank_by_depth=ranks,
        singular_values=[float(s) for s in sigma],
        rank=rank,
        tol_rank=tol_rank,
    )
