import numpy as np
import pytest

from finsler_holonomy.algebra import (
    IndicatrixField,
    constant_curvature_field,
    curvature_field,
    curvature_generators,
    curvature_operator,
    dimension_estimate,
    equilibrate,
    generate_algebra,
    jacobian_consistency,
    lie_bracket,
    linear_field,
    numerical_rank,
    operator_algebra_rank,
    required_samples,
    rotation_generator,
    surface_algebra_rank,
    wedge,
)
from finsler_holonomy.errors import ConfigurationError, ValidationError
from finsler_holonomy.geometry import fundamental_tensor, sample_indicatrix
from finsler_holonomy.kernels import EuclideanKernel, SphereKernel, get_kernel
from finsler_holonomy.models import TangentSample


@pytest.fixture(scope="module")
def sphere():
    return get_kernel("sphere")


@pytest.fixture(scope="module")
def sphere_samples(sphere):
    return sample_indicatrix(sphere, np.zeros(3), 40, seed=5)


@pytest.fixture(scope="module")
def euclidean_points():
    return sample_indicatrix(EuclideanKernel(3), np.zeros(3), 20, seed=5).points


def test_rotation_bracket(euclidean_points):
    """[L12, L23] = -L13."""
    bracket = lie_bracket(rotation_generator(0, 1, 3), rotation_generator(1, 2, 3))
    expected = -rotation_generator(0, 2, 3).values(euclidean_points)
    assert bracket.label == "[L12,L23]"
    assert bracket.depth == 2
    assert np.allclose(bracket.values(euclidean_points), expected, atol=1e-12)


def test_bracket_with_itself_vanishes(euclidean_points):
    xi = linear_field(np.arange(9.0).reshape(3, 3))
    assert np.allclose(lie_bracket(xi, xi).values(euclidean_points), 0.0)


def test_bracket_needs_common_base_point():
    with pytest.raises(ValidationError):
        lie_bracket(rotation_generator(0, 1, 3), rotation_generator(0, 1, 3, base_x=[1.0, 0.0, 0.0]))


def test_dimension_estimate(euclidean_points):
    generators = [rotation_generator(j, k, 3) for j, k in ((0, 1), (0, 2), (1, 2))]
    assert dimension_estimate(generators[:1], euclidean_points) == 1
    assert dimension_estimate(generators, euclidean_points) == 3

    rescaled = [generators[0].scaled(1e6), generators[1].scaled(1e-4), generators[2]]
    assert dimension_estimate(rescaled, euclidean_points) == 3

    closed = generators + [lie_bracket(generators[0], generators[2])]
    assert dimension_estimate(closed, euclidean_points) == 3


@pytest.mark.parametrize("factor", [1e-9, 1e-6, 1e6, 1e10])
def test_dimension_estimate_ignores_field_scale(euclidean_points, factor):
    generators = [rotation_generator(j, k, 3) for j, k in ((0, 1), (0, 2), (1, 2))]
    rescaled = [generators[0], generators[1].scaled(factor), generators[2]]
    assert dimension_estimate(rescaled, euclidean_points) == 3


def test_equilibrate_keeps_only_vanishing_rows_dead():
    tiny = np.array([[1e-11, 0.0, 2e-11, 0.0], [5e-13, 0.0, 0.0, 0.0]])
    scaled = equilibrate(tiny, 2)
    assert np.allclose(np.linalg.norm(scaled[0]), 1.0)
    assert np.allclose(scaled[1], 0.0)
    assert numerical_rank(scaled)[0] == 1
    assert numerical_rank(equilibrate(tiny[1:], 2))[0] == 0


def test_dimension_estimate_needs_input(euclidean_points):
    with pytest.raises(ValidationError):
        dimension_estimate([], euclidean_points)


def test_equilibrate_and_rank():
    matrix = np.array([[1e-8, 0.0, 3.0, 4.0], [0.0, 0.0, 0.0, 0.0]])
    scaled = equilibrate(matrix, 2)
    assert np.allclose(np.linalg.norm(scaled[0]), 1.0)
    assert np.allclose(scaled[1], 0.0)
    rank, sigma = numerical_rank(scaled)
    assert rank == 1
    assert sigma.shape == (2,)
    assert numerical_rank(np.zeros((0, 4)))[0] == 0


def test_required_samples():
    # 3 + 3 + 9 + 27 fields through depth 4 in dimension 3
    assert required_samples(3, 3, 4) == 140


def test_constant_curvature_field_basics():
    identity = lambda y: np.eye(3)  # noqa: E731
    y = np.array([0.0, 1.0, 0.0])
    assert np.allclose(constant_curvature_field(1.0, np.zeros((3, 3)), identity, y), 0.0)
    assert np.allclose(constant_curvature_field(1.0, wedge(0, 1, 3), identity, y), [2.0, 0.0, 0.0])
    with pytest.raises(ValidationError):
        constant_curvature_field(1.0, np.eye(3), identity, y)


def test_sphere_curvature_is_constant_curvature_field(sphere, sphere_samples):
    x = np.zeros(3)

    def g_provider(y):
        return fundamental_tensor(sphere, TangentSample.of(x, y))[0]

    for j, k in ((0, 1), (0, 2), (1, 2)):
        X, Y = np.eye(3)[j], np.eye(3)[k]
        values = curvature_field(sphere, x, X, Y).values(sphere_samples.points)
        for y, value in zip(sphere_samples.points[:10], values[:10]):
            expected = constant_curvature_field(-0.5, wedge(j, k, 3), g_provider, y)
            assert np.allclose(value, expected, atol=1e-8)


def test_curvature_field_is_antisymmetric_and_bilinear():
    kernel = get_kernel("heisenberg-bm")
    x = kernel.default_point()
    points = sample_indicatrix(kernel, x, 10, seed=3, margin=kernel.sampling_margin).points
    X1, X2, Y = np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.5]), np.array([0.2, 0.0, 1.0])

    forward = curvature_field(kernel, x, X1, Y).values(points)
    backward = curvature_field(kernel, x, Y, X1).values(points)
    assert np.allclose(forward, -backward, atol=1e-10)

    combined = curvature_field(kernel, x, X1 + 2.0 * X2, Y).values(points)
    parts = forward + 2.0 * curvature_field(kernel, x, X2, Y).values(points)
    assert np.allclose(combined, parts, atol=1e-9)


def test_curvature_field_rejects_bad_directions(sphere):
    with pytest.raises(ValidationError):
        curvature_field(sphere, np.zeros(3), [1.0, 0.0], [0.0, 1.0])


def test_curvature_jacobian_matches_finite_differences(sphere, sphere_samples):
    field = curvature_field(sphere, np.zeros(3), [1.0, 0.0, 0.0], [0.0, 0.0, 1.0])
    assert jacobian_consistency(field, sphere_samples.points[:8]) < 1e-6


def test_curvature_brackets_close_on_sphere(sphere, sphere_samples):
    r12, r13, r23 = curvature_generators(sphere, np.zeros(3))
    bracket = lie_bracket(r12, r13)
    assert not bracket.exact
    assert bracket.has_jets
    assert dimension_estimate([r12, r13, r23, bracket], sphere_samples) == 3


def test_curvature_bracket_jets_are_consistent():
    kernel = get_kernel("heisenberg-bm")
    x = np.zeros(3)
    points = sample_indicatrix(kernel, x, 8, seed=3, margin=kernel.sampling_margin).points
    r12, r13, r23 = curvature_generators(kernel, x)

    # without jets the same bracket goes through the jacobians alone
    plain = [IndicatrixField(x, f.label, f.values, f.jacobian, kernel=kernel) for f in (r12, r13)]
    fallback = lie_bracket(*plain)
    bracket = lie_bracket(r12, r13)
    assert not fallback.has_jets
    assert np.allclose(bracket.values(points), fallback.values(points), atol=1e-10)

    deeper = lie_bracket(r23, bracket)
    assert deeper.has_jets
    assert jacobian_consistency(bracket, points) < 1e-6
    assert jacobian_consistency(deeper, points) < 1e-5


def test_generate_algebra_euclidean_is_trivial():
    kernel = EuclideanKernel(3)
    samples = sample_indicatrix(kernel, np.zeros(3), 30, seed=1)
    report = generate_algebra(kernel, np.zeros(3), None, 3, samples)
    assert report.rank == 0
    assert report.rank_by_depth == [0, 0, 0]


def test_generate_algebra_sphere(sphere, sphere_samples):
    report = generate_algebra(sphere, np.zeros(3), None, 3, sphere_samples)
    assert report.rank == 3
    assert report.rank_by_depth == [3, 3, 3]
    assert report.generators == ["r(e1,e2)", "r(e1,e3)", "r(e2,e3)"]
    assert report.fields_by_depth[0].max_tangency_defect < 1e-8


def test_generated_fields_stay_tangent():
    kernel = get_kernel("heisenberg-bm")
    x = np.zeros(3)
    samples = sample_indicatrix(kernel, x, 60, seed=7, margin=kernel.sampling_margin)
    report = generate_algebra(kernel, x, None, 3, samples)
    assert report.tangency_closed
    assert report.tol_tangency == 1e-5
    for summary in report.fields_by_depth:
        assert summary.tangent
        assert summary.max_tangency_defect < 1e-5


def test_tangency_failure_is_reported(monkeypatch, sphere, sphere_samples):
    from finsler_holonomy.algebra import generation

    monkeypatch.setattr(generation, "tangency_defects", lambda kernel, field, points: np.full(len(points), 1e-3))
    report = generate_algebra(sphere, np.zeros(3), None, 2, sphere_samples, tol_tangency=1e-4)
    assert not report.tangency_closed
    assert report.tol_tangency == 1e-4
    assert not report.fields_by_depth[0].tangent
    assert report.fields_by_depth[0].max_tangency_defect == pytest.approx(1e-3)
    assert report.rank == 3


def test_generate_algebra_starvation(sphere):
    samples = sample_indicatrix(sphere, np.zeros(3), 2, seed=1)
    with pytest.raises(ConfigurationError):
        generate_algebra(sphere, np.zeros(3), None, 2, samples)


def test_generate_algebra_depth(sphere, sphere_samples):
    with pytest.raises(ConfigurationError):
        generate_algebra(sphere, np.zeros(3), None, 0, sphere_samples)


def test_surface_rank_is_at_most_one():
    assert surface_algebra_rank(SphereKernel(dim=2)) == 1
    assert surface_algebra_rank(EuclideanKernel(2)) == 0
    with pytest.raises(ValidationError):
        surface_algebra_rank(SphereKernel(dim=3))


def test_curvature_operator(sphere):
    y = np.array([0.5, 0.0, 0.0])
    M = curvature_operator(sphere, np.zeros(3), [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], y)
    field = curvature_field(sphere, np.zeros(3), [1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    assert np.allclose(M @ y, field(y), atol=1e-10)


def test_operator_algebra_rank_sphere(sphere):
    report = operator_algebra_rank(sphere, max_depth=3)
    assert report.rank == 3
    assert report.rank_by_depth == [3, 3, 3]
    assert len(report.generators) == 3
