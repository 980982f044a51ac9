"""Unit tests for metric kernels, the expression language and the registry."""

from pathlib import Path

import numpy as np
import pytest

from finsler_holonomy.errors import ConfigurationError, ValidationError
from finsler_holonomy.kernels import (
    EuclideanKernel,
    ExpressionKernel,
    FrozenKernel,
    FunkKernel,
    HeisenbergBerwaldMoorKernel,
    SphereKernel,
    available_kernels,
    compile_expression,
    get_kernel,
    load_custom_file,
    load_riemannian_file,
    parse_expression,
)

DATA = Path(__file__).resolve().parent.parent / "data"


def test_registry_builtins():
    assert isinstance(get_kernel("euclidean"), EuclideanKernel)
    assert isinstance(get_kernel("sphere"), SphereKernel)
    assert isinstance(get_kernel("funk"), FunkKernel)
    assert isinstance(get_kernel("heisenberg-bm"), HeisenbergBerwaldMoorKernel)
    assert get_kernel("sphere") is get_kernel("sphere")


def test_registry_euclidean_dimension():
    kernel = get_kernel("euclidean:2")
    assert kernel.dim == 2
    assert kernel.name == "euclidean:2"


@pytest.mark.parametrize("spec", ["hyperbolic", "euclidean:zero", "euclidean:0", "custom", "sphere:4"])
def test_registry_rejects_unknown(spec):
    with pytest.raises(ConfigurationError):
        get_kernel(spec)


def test_available_kernels_lists_file_kinds():
    names = available_kernels()
    assert "heisenberg-bm" in names
    assert "custom:<file>" in names
    assert "riemannian:<file>" in names


def test_heisenberg_metric_values():
    kernel = HeisenbergBerwaldMoorKernel()
    assert float(kernel.metric(np.zeros(3), np.array([8.0, 8.0, 8.0]))) == pytest.approx(64.0)
    assert float(kernel.metric(np.array([1.0, 0.0, 0.0]), np.array([1.0, 2.0, 1.0]))) == pytest.approx(1.0)


def test_heisenberg_cone():
    kernel = HeisenbergBerwaldMoorKernel()
    assert kernel.cone_test(np.zeros(3), np.array([1.0, 1.0, 1.0]))
    assert not kernel.cone_test(np.zeros(3), np.array([1.0, -1.0, 1.0]))
    # y2 - x1 y3 = 0 on the boundary
    assert not kernel.cone_test(np.array([1.0, 0.0, 0.0]), np.array([1.0, 1.0, 1.0]))


def test_funk_default_point_is_off_center():
    kernel = FunkKernel()
    assert np.linalg.norm(kernel.default_point()) > 0
    assert not kernel.cone_test(np.array([1.0, 0.0, 0.0]), np.array([1.0, 0.0, 0.0]))


def test_frozen_kernel_ignores_x():
    kernel = FrozenKernel(HeisenbergBerwaldMoorKernel(), np.zeros(3))
    y = np.array([1.0, 2.0, 1.0])
    assert float(kernel.metric(np.array([1.0, 0.0, 0.0]), y)) == pytest.approx(2.0 ** (2.0 / 3.0))


def test_check_shapes():
    with pytest.raises(ValidationError):
        EuclideanKernel(3).cone_test(np.zeros(2), np.ones(3))


def test_parse_and_compile_expression():
    expr = parse_expression("x1^2 + 2*y1*y2 - sqrt(y3^2)/4", 3)
    fn = compile_expression(expr)
    value = float(fn(np.array([3.0, 0.0, 0.0]), np.array([1.0, 2.0, 4.0])))
    assert value == pytest.approx(9.0 + 4.0 - 1.0)


@pytest.mark.parametrize(
    "source",
    ["x1 +", "x4", "z1", "y1 * (y2", "sqrt y1"],
)
def test_parse_errors(source):
    with pytest.raises(ConfigurationError) as excinfo:
        parse_expression(source, 3)
    assert "column" in str(excinfo.value)


def test_parse_rejects_fiber_variables_in_metric_entries():
    with pytest.raises(ConfigurationError):
        parse_expression("y1", 2, allow_y=False)


def test_load_riemannian_file():
    kernel = load_riemannian_file(str(DATA / "conformal_sphere.json"))
    assert kernel.name == "conformal-sphere"
    assert kernel.dim == 3
    value = float(kernel.metric(np.zeros(3), np.array([1.0, 0.0, 0.0])))
    assert value == pytest.approx(4.0)


def test_load_custom_file():
    kernel = load_custom_file(str(DATA / "berwald_moor_custom.json"))
    assert isinstance(kernel, ExpressionKernel)
    assert kernel.sampling_margin == 0.3
    assert float(kernel.metric(np.zeros(3), np.array([8.0, 8.0, 8.0]))) == pytest.approx(64.0)
    assert kernel.cone_test(np.zeros(3), np.array([1.0, 1.0, 1.0]))
    assert not kernel.cone_test(np.zeros(3), np.array([1.0, -1.0, 1.0]))


def test_kernel_file_errors(tmp_path):
    with pytest.raises(ConfigurationError):
        load_custom_file(str(tmp_path / "missing.json"))

    bad = tmp_path / "bad.json"
    bad.write_text('{"dimension": 2, "function": "y1^2", "colour": "red"}', encoding="utf-8")
    with pytest.raises(ConfigurationError):
        load_custom_file(str(bad))

    asymmetric = tmp_path / "asym.json"
    asymmetric.write_text('{"dimension": 2, "metric": [["1", "x1"], ["0", "1"]]}', encoding="utf-8")
    with pytest.raises(ConfigurationError):
        load_riemannian_file(str(asymmetric))


def test_registry_loads_files():
    kernel = get_kernel(f"riemannian:{DATA / 'flat_plane.json'}")
    assert kernel.dim == 2
