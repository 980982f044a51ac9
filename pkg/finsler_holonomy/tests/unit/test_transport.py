"""Unit tests for curves, parallel transport and holonomy tabulation."""

import numpy as np
import pytest

from finsler_holonomy.algebra import curvature_field
from finsler_holonomy.errors import (
    CommutatorStepError,
    CompositionError,
    ConfigurationError,
    DomainError,
    TransportDomainError,
)
from finsler_holonomy.geometry import sample_indicatrix
from finsler_holonomy.heisenberg import closed_form_r
from finsler_holonomy.kernels import EuclideanKernel, get_kernel
from finsler_holonomy.transport import (
    commutator_loop_derivative,
    compose,
    curve_start,
    drift_convergence,
    holonomy_samples,
    identity_holonomy,
    inverse_loop,
    is_closed,
    loop_transport,
    metric_drift,
    octant_loop,
    octant_rotation,
    parse_curve,
    polyline,
    reference_holonomy,
    richardson_error,
    square_loop,
    tabulate_holonomy,
    transport,
    transport_batch,
)


def test_square_loop_is_closed():
    loop = square_loop(np.zeros(3), (0, 2), 0.1)
    assert is_closed(loop)
    assert loop.name == "square(plane=13, side=0.1)"
    assert len(loop.pieces) == 4


def test_parse_curve_forms():
    assert parse_curve("octant", np.zeros(3), 3).name == "octant"
    square = parse_curve("square(plane=23, side=0.05, anchor=[0.1, 0.0, 0.0])", np.zeros(3), 3)
    assert np.allclose(square.pieces[0].start, [0.1, 0.0, 0.0])
    assert square.name == "square(plane=23, side=0.05)"
    line = parse_curve("polyline:[[0, 0], [1, 0], [1, 1]]", np.zeros(2), 2)
    assert len(line.pieces) == 2
    assert not is_closed(line)


@pytest.mark.parametrize(
    "text",
    [
        "circle",
        "square(plane=1, side=0.1)",
        "square(plane=14, side=0.1)",
        "square(plane=12, side=0.1, anchor=[0.1,,0])",
        "square(plane=12, side=0.1, anchor=[\"a\", 0, 0])",
        "polyline:[[0, 0]]",
        "polyline:[[0, \"a\", 0], [1, 0, 0]]",
        "file:/nonexistent.json",
    ],
)
def test_parse_curve_errors(text):
    with pytest.raises(ConfigurationError):
        parse_curve(text, np.zeros(3), 3)


def test_curve_file(tmp_path):
    path = tmp_path / "curve.json"
    path.write_text(square_loop(np.zeros(3), (0, 1), 0.2).model_dump_json(), encoding="utf-8")
    curve = parse_curve(f"file:{path}", np.zeros(3), 3)
    assert is_closed(curve)


def test_euclidean_transport_is_identity():
    kernel = EuclideanKernel(3)
    curve = polyline([[0, 0, 0], [1, 2, 0], [0, 1, 3]])
    y0 = np.array([0.3, -0.4, 1.2])
    assert np.allclose(transport(kernel, curve, y0, 8), y0)

    samples = sample_indicatrix(kernel, np.zeros(3), 10, seed=4)
    element = loop_transport(kernel, octant_loop(), samples, 8)
    assert np.allclose(element.images, samples.points)


def test_too_few_steps():
    with pytest.raises(ConfigurationError):
        transport(EuclideanKernel(2), polyline([[0, 0], [1, 0]]), [1.0, 0.0], 3)


def test_initial_vector_outside_cone():
    with pytest.raises(DomainError):
        transport(get_kernel("heisenberg-bm"), polyline([[0, 0, 0], [0.1, 0, 0]]), [1.0, -1.0, 1.0], 10)


def test_transport_leaving_the_domain():
    kernel = get_kernel("funk")
    with pytest.raises(TransportDomainError) as excinfo:
        transport(kernel, polyline([[0, 0, 0], [2, 0, 0]]), [0.0, 1.0, 0.0], 100)
    assert excinfo.value.t_star == pytest.approx(0.5, abs=0.02)
    assert excinfo.value.sample_index == 0


def test_sphere_octant_holonomy():
    kernel = get_kernel("sphere")
    samples = sample_indicatrix(kernel, np.zeros(3), 10, seed=3)
    element = loop_transport(kernel, octant_loop(), samples, 400, estimate_error=True)
    assert np.max(np.abs(element.images - octant_rotation(samples.points))) < 1e-5
    assert element.max_projection_correction < 1e-6
    assert element.richardson_error < 1e-6
    assert reference_holonomy("sphere", "octant") is octant_rotation


def test_zero_area_loop_is_identity():
    kernel = get_kernel("sphere")
    samples = sample_indicatrix(kernel, np.zeros(3), 6, seed=3)
    loop = polyline([[0, 0, 0], [0.5, 0.2, 0], [0, 0, 0]])
    element = loop_transport(kernel, loop, samples, 400)
    assert np.max(np.abs(element.images - samples.points)) < 1e-8


def test_loop_must_start_at_samples():
    kernel = get_kernel("sphere")
    samples = sample_indicatrix(kernel, np.zeros(3), 4, seed=3)
    with pytest.raises(ConfigurationError):
        loop_transport(kernel, square_loop(np.array([0.1, 0, 0]), (0, 1), 0.1), samples, 10)
    with pytest.raises(ConfigurationError):
        loop_transport(kernel, polyline([[0, 0, 0], [0.1, 0, 0]]), samples, 10)


def test_heisenberg_square_preserves_metric():
    kernel = get_kernel("heisenberg-bm")
    loop = square_loop(np.zeros(3), (0, 2), 0.1)
    ys = np.array([[1.0, 1.0, 1.0]])
    images = transport_batch(kernel, loop, ys, 1000)
    assert metric_drift(kernel, loop, ys, images)[0] < 1e-8


def _drift_case(name):
    kernel = get_kernel(name)
    if name == "funk":
        x = kernel.default_point()
        return kernel, polyline([x, x + np.array([0.3, 0.2, 0.1])]), np.array([0.4, -0.2, 0.5])
    return kernel, square_loop(np.zeros(3), (0, 2), 0.2), np.array([1.0, 1.0, 1.0])


@pytest.mark.parametrize("name", ["funk", "heisenberg-bm"])
def test_drift_converges_at_fourth_order(name):
    kernel, curve, y0 = _drift_case(name)
    result = drift_convergence(kernel, curve, y0, [16, 32])
    assert result["drifts"][1] < result["drifts"][0]
    assert result["orders"][0] >= 3.5


@pytest.mark.slow
def test_drift_stays_small_on_a_hundred_cases():
    drifts = []
    for name in ("funk", "heisenberg-bm"):
        kernel, curve, _ = _drift_case(name)
        samples = sample_indicatrix(kernel, curve_start(curve), 50, seed=17, margin=max(1e-3, kernel.sampling_margin))
        images = transport_batch(kernel, curve, samples.points, 10_000)
        drifts.append(metric_drift(kernel, curve, samples.points, images))
    drifts = np.concatenate(drifts)
    assert drifts.shape == (100,)
    assert np.max(drifts) < 1e-6


def test_compose_with_identity_and_inverse():
    kernel = get_kernel("sphere")
    samples = sample_indicatrix(kernel, np.zeros(3), 8, seed=9)
    h = loop_transport(kernel, octant_loop(), samples, 200)

    same = compose(identity_holonomy(samples), h)
    assert np.allclose(same.images, h.images)

    back = loop_transport(kernel, inverse_loop(octant_loop()), samples, 200)
    round_trip = compose(h, back, kernel)
    assert np.max(np.abs(round_trip.images - samples.points)) < 2e-6


def test_compose_two_rotations():
    kernel = get_kernel("sphere")
    samples = sample_indicatrix(kernel, np.zeros(3), 8, seed=9)
    h = loop_transport(kernel, octant_loop(), samples, 200)
    twice = compose(h, h, kernel)
    expected = octant_rotation(octant_rotation(samples.points))
    assert np.max(np.abs(twice.images - expected)) < 1e-4


def test_compose_errors():
    kernel = get_kernel("sphere")
    at_origin = sample_indicatrix(kernel, np.zeros(3), 4, seed=1)
    elsewhere = sample_indicatrix(kernel, np.array([0.1, 0.0, 0.0]), 4, seed=1)
    h = loop_transport(kernel, octant_loop(), at_origin, 50)
    with pytest.raises(CompositionError):
        compose(h, identity_holonomy(elsewhere))
    with pytest.raises(CompositionError):
        compose(h, h)


def test_holonomy_samples_per_plane():
    kernel = get_kernel("sphere")
    samples = sample_indicatrix(kernel, np.zeros(3), 4, seed=1)
    elements = holonomy_samples(kernel, np.zeros(3), samples, [0.05, 0.1], 20)
    assert len(elements) == 6
    assert elements[0].loop.name == "square(plane=12, side=0.05)"


def test_richardson_error_is_small():
    kernel = get_kernel("sphere")
    samples = sample_indicatrix(kernel, np.zeros(3), 4, seed=1)
    assert richardson_error(kernel, octant_loop(), samples.points, 100) < 1e-6


def test_richardson_error_reuses_coarse_images():
    kernel = get_kernel("sphere")
    samples = sample_indicatrix(kernel, np.zeros(3), 4, seed=1)
    coarse = transport_batch(kernel, octant_loop(), samples.points, 100)
    assert richardson_error(kernel, octant_loop(), samples.points, 100, coarse=coarse) == pytest.approx(
        richardson_error(kernel, octant_loop(), samples.points, 100), abs=1e-15
    )


def test_tabulate_holonomy_matches_loop_transport():
    kernel = get_kernel("sphere")
    samples = sample_indicatrix(kernel, np.zeros(3), 6, seed=2)
    raw = transport_batch(kernel, octant_loop(), samples.points, 100)
    element = tabulate_holonomy(kernel, octant_loop(), samples, raw, 100, error=1e-9)
    expected = loop_transport(kernel, octant_loop(), samples, 100)
    assert np.allclose(element.images, expected.images, atol=1e-14)
    assert element.richardson_error == 1e-9
    with pytest.raises(ConfigurationError):
        tabulate_holonomy(kernel, polyline([[0, 0, 0], [0.1, 0, 0]]), samples, raw, 100)


def test_commutator_loop_euclidean_is_zero():
    kernel = EuclideanKernel(3)
    samples = sample_indicatrix(kernel, np.zeros(3), 5, seed=1)
    field = commutator_loop_derivative(kernel, np.zeros(3), [1, 0, 0], [0, 1, 0], 0.1, samples, 10)
    assert np.allclose(field.values, 0.0)


def test_commutator_loop_matches_sphere_curvature():
    kernel = get_kernel("sphere")
    samples = sample_indicatrix(kernel, np.zeros(3), 8, seed=1)
    e1, e2 = np.eye(3)[0], np.eye(3)[1]
    estimate = commutator_loop_derivative(kernel, np.zeros(3), e1, e2, 0.02, samples, 100)
    exact = curvature_field(kernel, np.zeros(3), e1, e2).values(samples.points)
    assert np.linalg.norm(estimate.values - exact) / np.linalg.norm(exact) < 0.05


def test_commutator_loop_converges_to_heisenberg_closed_form():
    kernel = get_kernel("heisenberg-bm")
    x = np.zeros(3)
    samples = sample_indicatrix(kernel, x, 6, seed=2, margin=kernel.sampling_margin)
    expected = np.stack([closed_form_r(1, 3, x, y) for y in samples.points])
    errors = []
    for t in (0.08, 0.04, 0.02):
        estimate = commutator_loop_derivative(kernel, x, [1, 0, 0], [0, 0, 1], t, samples, 200)
        errors.append(np.max(np.abs(estimate.values - expected)))
    orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert np.all(orders >= 0.9)


def test_commutator_loop_step_error():
    kernel = get_kernel("funk")
    samples = sample_indicatrix(kernel, np.zeros(3), 3, seed=1)
    with pytest.raises(CommutatorStepError):
        commutator_loop_derivative(kernel, np.zeros(3), [1, 0, 0], [0, 1, 0], 1.5, samples, 40)
