"""Slow end-to-end checks of curvature-algebra growth."""

import numpy as np
import pytest

from finsler_holonomy.algebra import generate_algebra
from finsler_holonomy.geometry import sample_indicatrix
from finsler_holonomy.heisenberg import AppendixVerifier, infinite_dim_evidence
from finsler_holonomy.kernels import get_kernel
from finsler_holonomy.models import RunConfig
from finsler_holonomy.orchestration import AnalysisPipeline

pytestmark = pytest.mark.slow


@pytest.mark.parametrize("source", ["pipeline", "closed-form"])
def test_heisenberg_ranks_grow(source):
    table = infinite_dim_evidence(max_depth=3, samples=60, source=source)
    ranks = [row.rank for row in table.rows]
    assert ranks[0] == 3
    assert ranks[1] >= 5
    assert table.strictly_increasing


def test_pipeline_matches_closed_forms():
    error, _ = AppendixVerifier().check_pipeline_vs_closed_form()
    assert error < 1e-6


def test_funk_algebra_exceeds_rotations():
    kernel = get_kernel("funk")
    x = np.array([0.3, 0.1, -0.2])
    samples = sample_indicatrix(kernel, x, 64, seed=7)
    report = generate_algebra(kernel, x, None, 3, samples)
    assert report.rank > 3


def test_analyze_heisenberg_to_depth_four():
    config = RunConfig(kernel="heisenberg-bm", depth=4)
    report = AnalysisPipeline(config).run_analyze()
    assert report.exit_status == 0
    algebra = report.deterministic.section("algebra").data
    assert algebra["samples_used"] == 140
    ranks = algebra["rank_by_depth"]
    assert all(b > a for a, b in zip(ranks, ranks[1:]))
    assert not report.deterministic.section("riemannian_test").data["is_semi_riemannian"]


def test_pipeline_and_closed_form_tables_agree():
    pipeline = infinite_dim_evidence(max_depth=4, samples=160, source="pipeline")
    closed = infinite_dim_evidence(max_depth=4, samples=160, source="closed-form")
    assert [row.rank for row in pipeline.rows] == [row.rank for row in closed.rows]
    assert [row.fields for row in pipeline.rows] == [row.fields for row in closed.rows]


@pytest.mark.parametrize("source", ["pipeline", "closed-form"])
def test_evidence_is_stable_across_samples_and_seeds(source):
    tables = [
        infinite_dim_evidence(max_depth=4, samples=samples, seed=seed, source=source)
        for samples, seed in ((160, 7), (320, 7), (160, 11))
    ]
    ranks = [[row.rank for row in table.rows] for table in tables]
    assert ranks[0] == ranks[1] == ranks[2]
    assert all(table.strictly_increasing for table in tables)
