"""Breadth-first curvature algebra generation and SVD rank estimation."""

import logging
import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import svdvals

from ..config import Config
from ..errors import ConfigurationError, ValidationError
from ..geometry.core import sample_indicatrix
from ..kernels.base import MetricKernel
from ..models import DEFAULT_TOLERANCES, AlgebraReport, DepthSummary, IndicatrixSampleSet
from .fields import IndicatrixField, curvature_generators, lie_bracket, tangency_defects

logger = logging.getLogger(__name__)

# samples * n must be at least this many times the number of fields
SAMPLES_PER_FIELD = 10
BLOCK_FLOOR = 1e-10
# a field whose values all stay below this is identically zero
ZERO_FIELD_TOL = 1e-12

PointsLike = Union[IndicatrixSampleSet, np.ndarray]


def _points(samples: PointsLike) -> np.ndarray:
    if isinstance(samples, IndicatrixSampleSet):
        return samples.points
    return np.atleast_2d(np.asarray(samples, dtype=float))


def evaluation_matrix(fields: Sequence[IndicatrixField], samples: PointsLike) -> np.ndarray:
    """One row per field: its values at every sample, flattened sample-major."""
    points = _points(samples)
    if not fields:
        return np.zeros((0, points.size))
    return np.stack([f.values(points).reshape(-1) for f in fields])


def equilibrate(matrix: np.ndarray, dim: int) -> np.ndarray:
    """Normalize rows, scale each sample block to unit max, drop negligible blocks.

    A row counts as dead only when every entry is at most ZERO_FIELD_TOL; rescaling
    a live field leaves the result unchanged.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.size == 0:
        return matrix.copy()
    rows = matrix.shape[0]
    live = np.max(np.abs(matrix), axis=1) > ZERO_FIELD_TOL
    unit = np.zeros_like(matrix)
    if not np.any(live):
        return unit
    unit[live] = matrix[live] / np.linalg.norm(matrix[live], axis=1)[:, None]

    blocks = unit.reshape(rows, -1, dim)
    scales = np.max(np.abs(blocks), axis=(0, 2))
    keep = scales > BLOCK_FLOOR * float(np.max(scales))
    factors = np.where(keep, 1.0 / np.where(keep, scales, 1.0), 0.0)
    scaled = (blocks * factors[None, :, None]).reshape(rows, -1)

    norms = np.linalg.norm(scaled, axis=1)
    out = np.zeros_like(scaled)
    nonzero = norms > 0.0
    out[nonzero] = scaled[nonzero] / norms[nonzero, None]
    return out


def numerical_rank(
    matrix: np.ndarray, tol_rank: float = DEFAULT_TOLERANCES.tol_rank
) -> Tuple[int, np.ndarray]:
    """Number of singular values above tol_rank * sigma_max, and the singular values."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.size == 0:
        return 0, np.zeros(0)
    sigma = svdvals(matrix)
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0, sigma
    return int(np.sum(sigma > tol_rank * sigma[0])), sigma


def dimension_estimate(
    fields: Sequence[IndicatrixField],
    samples: PointsLike,
    tol_rank: float = DEFAULT_TOLERANCES.tol_rank,
) -> int:
    points = _points(samples)
    if not fields or points.shape[0] == 0:
        raise ValidationError("Dimension estimate needs at least one field and one sample")
    matrix = equilibrate(evaluation_matrix(fields, points), points.shape[1])
    return numerical_rank(matrix, tol_rank)[0]


def max_fields(generator_count: int, max_depth: int) -> int:
    """Upper bound on the number of fields generated through max_depth."""
    total = level = generator_count
    for depth in range(2, max_depth + 1):
        level = generator_count * (generator_count - 1) // 2 if depth == 2 else generator_count * level
        total += level
    return total


def required_samples(dim: int, generator_count: int, max_depth: int) -> int:
    return math.ceil(SAMPLES_PER_FIELD * max_fields(generator_count, max_depth) / dim)


def _check_starvation(field_count: int, samples: int, dim: int) -> None:
    if samples * dim < SAMPLES_PER_FIELD * field_count:
        raise ConfigurationError(
            f"{samples} samples in dimension {dim} cannot resolve {field_count} fields; "
            f"need at least {math.ceil(SAMPLES_PER_FIELD * field_count / dim)} samples"
        )


def _incremental(
    matrix: np.ndarray, accepted: List[int], candidates: Sequence[int], tol_rank: float
) -> List[int]:
    """Greedily pick candidate rows that raise the rank of the accepted rows."""
    chosen = []
    current = numerical_rank(matrix[accepted], tol_rank)[0] if accepted else 0
    for index in candidates:
        rank = numerical_rank(matrix[accepted + chosen + [index]], tol_rank)[0]
        if rank > current:
            chosen.append(index)
            current = rank
    return chosen


def generate_algebra(
    kernel: MetricKernel,
    x,
    generators: Optional[Sequence[IndicatrixField]],
    max_depth: int,
    samples: IndicatrixSampleSet,
    tol_rank: float = DEFAULT_TOLERANCES.tol_rank,
    tol_tangency: Optional[float] = None,
) -> AlgebraReport:
    """Bracket closure by depth with rank pruning.

    Depth 2 brackets distinct pairs of rank-increasing generators; depth d + 1
    brackets rank-increasing generators with rank-increasing depth-d fields.
    Each depth records its largest tangency defect against ``tol_tangency``
    (``Config.tangency_tol()`` when unset).
    """
    if tol_tangency is None:
        tol_tangency = Config.tangency_tol()
    if max_depth < 1:
        raise ConfigurationError(f"Algebra depth must be at least 1, got {max_depth}")
    x = np.asarray(x, dtype=float)
    if generators is None:
        generators = curvature_generators(kernel, x)
    generators = list(generators)
    points = _points(samples)
    count, dim = points.shape

    fields: List[IndicatrixField] = []
    accepted: List[int] = []
    summaries: List[DepthSummary] = []
    level: List[IndicatrixField] = generators
    increasing_generators: List[IndicatrixField] = []
    increasing_level: List[IndicatrixField] = []
    sigma = np.zeros(0)
    rank = 0
    matrix = np.zeros((0, points.size))

    for depth in range(1, max_depth + 1):
        if depth == 2:
            level = [
                lie_bracket(a, b)
                for i, a in enumerate(increasing_generators)
                for b in increasing_generators[i + 1 :]
            ]
        elif depth > 2:
            level = [lie_bracket(a, b) for a in increasing_generators for b in increasing_level]

        _check_starvation(len(fields) + len(level), count, dim)
        start = len(fields)
        fields.extend(level)
        logger.info(f"Depth {depth}: evaluating {len(level)} new fields ({len(fields)} total)")

        raw = evaluation_matrix(fields, points)
        matrix = equilibrate(raw, dim)
        new_indices = list(range(start, len(fields)))
        chosen = _incremental(matrix, accepted, new_indices, tol_rank)
        accepted.extend(chosen)
        rank, sigma = numerical_rank(matrix, tol_rank)

        increasing_level = [fields[i] for i in chosen]
        if depth == 1:
            increasing_generators = increasing_level

        defect = 0.0
        for f in level:
            defect = max(defect, float(np.max(tangency_defects(kernel, f, points))))
        tangent = defect <= tol_tangency
        if not tangent:
            logger.warning(
                f"Depth {depth} fields leave the indicatrix tangent space "
                f"(defect {defect:.2e} > {tol_tangency:.0e})"
            )

        summaries.append(
            DepthSummary(
                depth=depth,
                labels=[f.label for f in level],
                rank_increasing=[f.label for f in increasing_level],
                rank=rank,
                max_tangency_defect=defect,
                tangent=tangent,
            )
        )
        logger.info(f"Depth {depth}: rank {rank}")
        if not increasing_level and depth < max_depth:
            logger.info(f"No rank-increasing fields at depth {depth}; closure reached")
            for later in range(depth + 1, max_depth + 1):
                summaries.append(DepthSummary(depth=later, rank=rank))
            break

    return AlgebraReport(
        generators=[g.label for g in generators],
        depth=max_depth,
        fields_by_depth=summaries,
        singular_values=[float(s) for s in sigma],
        rank=rank,
        tol_rank=tol_rank,
        samples_used=count,
        tol_tangency=tol_tangency,
        tangency_closed=all(s.tangent for s in summaries),
        evaluation_matrix=raw.tolist() if fields else None,
    )


def surface_algebra_rank(
    kernel: MetricKernel,
    x=None,
    depth: int = 3,
    sample_count: int = 40,
    seed: int = 7,
    tol_rank: float = DEFAULT_TOLERANCES.tol_rank,
) -> int:
    """Rank of the curvature algebra of a two-dimensional kernel (at most one)."""
    if kernel.dim != 2:
        raise ValidationError(f"Surface rank needs a two-dimensional kernel, got n={kernel.dim}")
    x = kernel.default_point() if x is None else np.asarray(x, dtype=float)
    samples = sample_indicatrix(kernel, x, sample_count, seed, margin=kernel.sampling_margin or None)
    return generate_algebra(kernel, x, None, depth, samples, tol_rank).rank
