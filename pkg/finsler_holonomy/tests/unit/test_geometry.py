"""Unit tests for the derivative oracle, fundamental tensor, validation and sampling."""

import numpy as np
import pytest

from finsler_holonomy.errors import (
    DegenerateMetricError,
    DomainError,
    NonPositiveValueError,
    SamplingCoverageError,
    UnsupportedOrderError,
    ValidationError,
)
from finsler_holonomy.geometry import (
    DerivativeOracle,
    derivative_oracle,
    evaluate_metric,
    fundamental_tensor,
    indicatrix_project,
    sample_indicatrix,
    validate_homogeneity,
    validate_minkowski_axioms,
)
from finsler_holonomy.geometry.core import check_nondegenerate
from finsler_holonomy.kernels import EuclideanKernel, ExpressionKernel, get_kernel, parse_expression
from finsler_holonomy.models import TangentSample

HEISENBERG_G = np.array([[-1.0, 2.0, 2.0], [2.0, -1.0, 2.0], [2.0, 2.0, -1.0]]) / 9.0


def test_evaluate_metric():
    assert evaluate_metric(EuclideanKernel(2), TangentSample.of([0, 0], [3, 4])) == pytest.approx(25.0)
    heisenberg = get_kernel("heisenberg-bm")
    assert evaluate_metric(heisenberg, TangentSample.of([0, 0, 0], [8, 8, 8])) == pytest.approx(64.0)
    assert evaluate_metric(heisenberg, TangentSample.of([1, 0, 0], [1, 2, 1])) == pytest.approx(1.0)


def test_evaluate_metric_outside_cone():
    with pytest.raises(DomainError) as excinfo:
        evaluate_metric(get_kernel("heisenberg-bm"), TangentSample.of([0, 0, 0], [1, -1, 1]))
    assert excinfo.value.y == [1.0, -1.0, 1.0]


def test_oracle_euclidean():
    kernel = EuclideanKernel(3)
    sample = TangentSample.of([0.2, -0.1, 0.4], [0.3, 1.2, -0.7])
    assert derivative_oracle(kernel, sample, (0, 0, 0), (2, 0, 0)) == pytest.approx(2.0)
    assert derivative_oracle(kernel, sample, (1, 0, 0), (0, 0, 0)) == pytest.approx(0.0, abs=1e-12)
    assert derivative_oracle(kernel, sample, (0, 0, 0), (2, 0, 0), method="fd") == pytest.approx(2.0, rel=1e-6)


@pytest.mark.parametrize("method", ["exact", "fd"])
def test_oracle_heisenberg_mixed_partial(method):
    sample = TangentSample.of([0, 0, 0], [1, 1, 1])
    value = derivative_oracle(get_kernel("heisenberg-bm"), sample, (0, 0, 0), (1, 1, 0), method=method)
    assert value == pytest.approx(4.0 / 9.0, rel=1e-6)


def test_oracle_errors():
    oracle = DerivativeOracle(get_kernel("heisenberg-bm"))
    with pytest.raises(UnsupportedOrderError) as excinfo:
        oracle.partial(TangentSample.of([0, 0, 0], [1, 1, 1]), (1, 0, 0), (2, 2, 1))
    assert excinfo.value.order == 6
    with pytest.raises(DomainError):
        oracle.partial(TangentSample.of([0, 0, 0], [1, 1e-6, 1]), (0, 0, 0), (1, 0, 0))
    with pytest.raises(ValidationError):
        DerivativeOracle(get_kernel("heisenberg-bm"), method="symbolic")
    with pytest.raises(ValidationError):
        oracle.partial(TangentSample.of([0, 0, 0], [1, 1, 1]), (0, 0), (1, 0, 0))


def test_fundamental_tensor_euclidean():
    g, g_inv = fundamental_tensor(EuclideanKernel(3), TangentSample.of([1, 2, 3], [0.1, -2, 5]))
    assert np.allclose(g, np.eye(3))
    assert np.allclose(g_inv, np.eye(3))


@pytest.mark.parametrize("method", ["exact", "fd"])
def test_fundamental_tensor_heisenberg(method):
    g, g_inv = fundamental_tensor(
        get_kernel("heisenberg-bm"), TangentSample.of([0, 0, 0], [1, 1, 1]), method=method
    )
    assert np.allclose(g, HEISENBERG_G, atol=1e-6)
    assert np.allclose(g @ g_inv, np.eye(3), atol=1e-8)


def test_degenerate_tensor():
    with pytest.raises(DegenerateMetricError) as excinfo:
        check_nondegenerate(np.diag([1.0, 1e-14]))
    assert excinfo.value.sigma_min == pytest.approx(1e-14)


def test_validate_homogeneity():
    report = validate_homogeneity(EuclideanKernel(2), TangentSample.of([0, 0], [3, 4]), [2.0])
    assert report.passed
    assert report.max_relative_deviation == pytest.approx(0.0, abs=1e-15)

    heisenberg = validate_homogeneity(get_kernel("heisenberg-bm"), TangentSample.of([0, 0, 0], [1, 1, 1]), [3.0])
    assert heisenberg.max_relative_deviation <= 1e-12
    assert heisenberg.passed


def test_validate_homogeneity_detects_wrong_degree():
    kernel = ExpressionKernel("cubic", 2, parse_expression("(y1^2 + y2^2)^(3/2)", 2))
    report = validate_homogeneity(kernel, TangentSample.of([0, 0], [1, 0]), [2.0])
    assert not report.passed


def test_indicatrix_project():
    assert np.allclose(indicatrix_project(EuclideanKernel(2), TangentSample.of([0, 0], [3, 4])), [0.6, 0.8])
    projected = indicatrix_project(get_kernel("heisenberg-bm"), TangentSample.of([0, 0, 0], [8, 8, 8]))
    assert np.allclose(projected, [1.0, 1.0, 1.0])
    assert np.allclose(indicatrix_project(EuclideanKernel(2), TangentSample.of([0, 0], [0, 1])), [0, 1])


def test_indicatrix_project_nonpositive():
    kernel = ExpressionKernel("signed", 2, parse_expression("y1^2 - 4*y2^2", 2))
    with pytest.raises(NonPositiveValueError):
        indicatrix_project(kernel, TangentSample.of([0, 0], [1, 1]))


def test_sample_indicatrix_euclidean():
    samples = sample_indicatrix(EuclideanKernel(3), np.zeros(3), 16, seed=7)
    assert samples.count == 16
    assert np.allclose(np.linalg.norm(samples.points, axis=1), 1.0, atol=1e-12)


def test_sample_indicatrix_is_deterministic():
    first = sample_indicatrix(get_kernel("sphere"), np.zeros(3), 12, seed=5)
    second = sample_indicatrix(get_kernel("sphere"), np.zeros(3), 12, seed=5)
    other = sample_indicatrix(get_kernel("sphere"), np.zeros(3), 12, seed=6)
    assert np.array_equal(first.points, second.points)
    assert not np.array_equal(first.points, other.points)


def test_sample_indicatrix_heisenberg_branch():
    samples = sample_indicatrix(get_kernel("heisenberg-bm"), np.zeros(3), 20, seed=7)
    assert np.all(samples.points > 0)
    assert 0.0 < samples.acceptance_rate < 0.5


def test_sample_indicatrix_thin_cone():
    kernel = get_kernel("heisenberg-bm")
    with pytest.raises(SamplingCoverageError) as excinfo:
        sample_indicatrix(kernel, np.zeros(3), 10, seed=7, margin=0.56)
    assert excinfo.value.acceptance_rate < 0.01


def test_sample_indicatrix_rejects_bad_arguments():
    with pytest.raises(ValidationError):
        sample_indicatrix(EuclideanKernel(3), np.zeros(3), 0, seed=1)
    with pytest.raises(ValidationError):
        sample_indicatrix(EuclideanKernel(3), np.zeros(2), 4, seed=1)


def test_minkowski_axioms():
    samples = sample_indicatrix(get_kernel("funk"), get_kernel("funk").default_point(), 12, seed=3)
    report = validate_minkowski_axioms(get_kernel("funk"), samples)
    assert report.passed
    assert report.positive_definite_violations == 0

    heisenberg = get_kernel("heisenberg-bm")
    report = validate_minkowski_axioms(heisenberg, sample_indicatrix(heisenberg, np.zeros(3), 12, seed=3))
    assert report.passed
    assert not report.positive_definite_claim


BUILTIN_POINTS = {
    "euclidean": [0.2, -0.1, 0.4],
    "sphere": [0.2, -0.1, 0.3],
    "funk": None,
    "heisenberg-bm": [0.1, 0.0, 0.0],
}

# (alpha, beta) pairs covering every order up to three, with x-partials
ORACLE_PARTIALS = [
    ((0, 0, 0), (1, 0, 0)),
    ((1, 0, 0), (0, 0, 0)),
    ((0, 0, 0), (1, 1, 0)),
    ((0, 1, 0), (0, 0, 1)),
    ((1, 0, 0), (0, 1, 1)),
    ((0, 0, 0), (0, 0, 3)),
    ((2, 0, 0), (1, 0, 0)),
]


def _builtin_samples(name: str, count: int, seed: int):
    kernel = get_kernel(name)
    x = kernel.default_point() if BUILTIN_POINTS[name] is None else np.array(BUILTIN_POINTS[name])
    margin = max(1e-3, kernel.sampling_margin)
    return kernel, sample_indicatrix(kernel, x, count, seed=seed, margin=margin)


@pytest.mark.slow
@pytest.mark.parametrize("name", sorted(BUILTIN_POINTS))
def test_oracle_exact_and_fd_agree(name):
    kernel, samples = _builtin_samples(name, 50, seed=13)
    exact = DerivativeOracle(kernel, method="exact")
    fd = DerivativeOracle(kernel, method="fd")
    worst = 0.0
    for sample in samples.samples():
        for alpha, beta in ORACLE_PARTIALS:
            a = exact.partial(sample, alpha, beta)
            b = fd.partial(sample, alpha, beta)
            worst = max(worst, abs(a - b) / max(1.0, abs(a)))
    assert worst < 1e-5


@pytest.mark.parametrize("name", sorted(BUILTIN_POINTS))
def test_homogeneity_holds_on_random_scales(name):
    kernel, samples = _builtin_samples(name, 100, seed=21)
    rng = np.random.default_rng(21)
    for sample in samples.samples():
        report = validate_homogeneity(kernel, sample, [float(rng.uniform(0.25, 4.0))])
        assert report.max_relative_deviation < 1e-10
        assert report.passed
