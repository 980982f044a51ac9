"""Golden checks for the Heisenberg Berwald-Moor case."""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
import sympy

from ..algebra.fields import curvature_field, lie_bracket
from ..errors import FinslerError
from ..geometry.oracle import DerivativeOracle
from ..kernels.registry import get_kernel
from ..models import DEFAULT_TOLERANCES, TangentSample, Tolerances
from .brackets import (
    bracket_coefficient_check,
    bracket_coefficients,
    cone_points,
    general_bracket_coefficients,
    grade_fit,
    second_system_determinant,
    symbolic_second_system_determinant,
)
from .closed_forms import GENERATOR_FORMS, PAIRS, akm_field, akm_vector_field, closed_form_r
from .group import (
    HeisenbergPoint,
    heisenberg_inverse,
    heisenberg_metric,
    heisenberg_multiply,
    left_translation_differential,
)

logger = logging.getLogger(__name__)

GOLDEN_Y = np.array([1.0, 1.0, 1.0])
GOLDEN_R = {
    (1, 2): np.array([-1.25, 0.25, 1.0]),
    (1, 3): np.array([2.75, 0.0, -2.75]),
    (2, 3): np.array([-1.0, -0.25, 1.25]),
}
KNOWN_BRACKETS = (
    ((1, 1), (1.0, 0.0, -1.0), (2, 2), (0.0, 0.0, 0.0)),
    ((1, 2), (-5.0, 1.0, 4.0), (2, 3), (8.0, -1.0, -7.0)),
    ((2, 1), (-4.0, -1.0, 5.0), (3, 2), (-7.0, -1.0, 8.0)),
)
ORACLE_TOLERANCE = 1e-6


@dataclass
class AppendixCheck:
    name: str
    passed: bool
    max_error: float
    tolerance: float
    detail: str = ""


def _random_group_points(rng: np.random.Generator, count: int) -> List[HeisenbergPoint]:
    return [HeisenbergPoint.of(p) for p in rng.uniform(-1.0, 1.0, size=(count, 3))]


def _cone_sample(rng: np.random.Generator, x: np.ndarray) -> np.ndarray:
    """A y in the cone at x: positive (y1, y2 - x1 y3, y3) pushed forward."""
    a = rng.uniform(0.5, 2.0, size=3)
    return np.array([a[0], a[1] + x[0] * a[2], a[2]])


class AppendixVerifier:
    """Runs the Heisenberg checks in a fixed order.

    ``sign_flip`` negates one closed-form formula; ``method`` and ``oracle_tol``
    apply to the derivative-oracle check.
    """

    def __init__(
        self,
        method: str = "auto",
        oracle_tol: Optional[float] = None,
        sign_flip: Optional[Tuple[int, int]] = None,
        seed: int = 2024,
        tolerances: Tolerances = DEFAULT_TOLERANCES,
    ):
        self.method = method
        self.oracle_tol = ORACLE_TOLERANCE if oracle_tol is None else oracle_tol
        self.sign_flip = sign_flip
        self.seed = seed
        self.tolerances = tolerances
        self.kernel = get_kernel("heisenberg-bm")

    def _r(self, i: int, j: int, x, y) -> np.ndarray:
        return closed_form_r(i, j, x, y, sign_flip=self.sign_flip)

    def checks(self) -> List[Tuple[str, float, Callable[[], Tuple[float, str]]]]:
        return [
            ("golden_values", 1e-12, self.check_golden_values),
            ("group_law", 1e-12, self.check_group_law),
            ("metric_invariance", 1e-10, self.check_metric_invariance),
            ("akm_identities", 1e-12, self.check_akm_identities),
            ("pipeline_vs_closed_form", 1e-6, self.check_pipeline_vs_closed_form),
            ("bracket_coefficients", 1e-8, self.check_bracket_coefficients),
            ("grade_arithmetic", 1e-8, self.check_grade_arithmetic),
            ("second_system_determinant", 1e-9, self.check_second_system),
            ("curvature_left_invariance", 1e-5, self.check_curvature_left_invariance),
            ("oracle_consistency", self.oracle_tol, self.check_oracle),
        ]

    def check_golden_values(self) -> Tuple[float, str]:
        error = max(
            float(np.max(np.abs(self._r(i, j, np.zeros(3), GOLDEN_Y) - GOLDEN_R[(i, j)])))
            for i, j in PAIRS
        )
        return error, "r_0(i,j) at y=(1,1,1)"

    def check_group_law(self) -> Tuple[float, str]:
        rng = np.random.default_rng(self.seed)
        product = heisenberg_multiply(HeisenbergPoint(1, 0, 0), HeisenbergPoint(0, 0, 1))
        error = float(np.max(np.abs(product.as_array() - np.ones(3))))
        for p in _random_group_points(rng, 20):
            unit = heisenberg_multiply(p, heisenberg_inverse(p)).as_array()
            error = max(error, float(np.max(np.abs(unit))))
        return error, "multiplication and inverse on 20 random points"

    def check_metric_invariance(self) -> Tuple[float, str]:
        rng = np.random.default_rng(self.seed + 1)
        error = abs(heisenberg_metric(np.zeros(3), GOLDEN_Y) - 1.0)
        error = max(error, abs(heisenberg_metric([1.0, 0.0, 0.0], [1.0, 2.0, 1.0]) - 1.0))
        for p in _random_group_points(rng, 20):
            x = rng.uniform(-0.5, 0.5, size=3)
            y = _cone_sample(rng, x)
            moved = heisenberg_multiply(p, HeisenbergPoint.of(x)).as_array()
            value = heisenberg_metric(x, y)
            pushed = heisenberg_metric(moved, left_translation_differential(p, y))
            error = max(error, abs(pushed - value) / value)
        return error, "F(p.x, dL_p y) = F(x, y) on 20 random p"

    def check_akm_identities(self) -> Tuple[float, str]:
        points = cone_points(20, self.seed + 2)
        error = 0.0
        for (i, j), (grade, a) in GENERATOR_FORMS.items():
            expected = 0.25 * akm_field(grade[0], grade[1], a, points)
            actual = np.stack([self._r(i, j, np.zeros(3), y) for y in points])
            error = max(error, float(np.max(np.abs(actual - expected) / np.max(np.abs(expected)))))
        return error, "4 r_0(i,j) as A-fields on 20 cone points"

    def check_pipeline_vs_closed_form(self) -> Tuple[float, str]:
        rng = np.random.default_rng(self.seed + 3)
        error = 0.0
        n = self.kernel.dim
        eye = np.eye(n)
        for _ in range(10):
            x = rng.uniform(-0.5, 0.5, size=3)
            ys = np.stack([_cone_sample(rng, x) for _ in range(10)])
            for i, j in PAIRS:
                numeric = curvature_field(self.kernel, x, eye[i - 1], eye[j - 1]).values(ys)
                closed = np.stack([self._r(i, j, x, y) for y in ys])
                scale = np.maximum(np.linalg.norm(closed, axis=1), np.finfo(float).tiny)
                error = max(error, float(np.max(np.linalg.norm(numeric - closed, axis=1) / scale)))
        return error, "curvature of the kernel against closed forms at 100 cone points"

    def check_bracket_coefficients(self) -> Tuple[float, str]:
        error = 0.0
        for grade, a, expected_grade, expected_c in KNOWN_BRACKETS:
            result = bracket_coefficient_check(grade[0], grade[1], a)
            if result.grade != expected_grade:
                return float("inf"), f"grade {result.grade} for A^{grade}, expected {expected_grade}"
            error = max(error, result.max_error, float(np.max(np.abs(result.c - expected_c))))
        rng = np.random.default_rng(self.seed + 4)
        for _ in range(10):
            k, m = (int(v) for v in rng.integers(0, 5, size=2))
            a = rng.normal(size=3)
            known = bracket_coefficients(k, m, a)[1]
            general = general_bracket_coefficients(1, 1, (1.0, 0.0, -1.0), k, m, a)[1]
            error = max(error, float(np.max(np.abs(known - general))))
        return error, "closed-form c-formulas, numeric brackets and the general rule"

    def check_grade_arithmetic(self) -> Tuple[float, str]:
        rng = np.random.default_rng(self.seed + 5)
        points = cone_points(20, self.seed + 6)
        error = 0.0
        for _ in range(6):
            p, q, k, m = (int(v) for v in rng.integers(0, 4, size=4))
            b, a = rng.normal(size=3), rng.normal(size=3)
            bracket = lie_bracket(akm_vector_field(p, q, b), akm_vector_field(k, m, a))
            grade, c = general_bracket_coefficients(p, q, b, k, m, a)
            _, residual = grade_fit(bracket, points, grade)
            predicted = akm_field(grade[0], grade[1], c, points)
            values = bracket.values(points)
            scale = max(float(np.max(np.abs(values))), float(np.max(np.abs(predicted))), 1e-300)
            error = max(error, residual, float(np.max(np.abs(values - predicted))) / scale)
        return error, "brackets of A-fields are single A-fields of the summed grade"

    def check_second_system(self) -> Tuple[float, str]:
        k = sympy.Symbol("k")
        symbolic = sympy.simplify(symbolic_second_system_determinant() + 27 * k**3)
        if symbolic != 0:
            return float("inf"), f"determinant differs from -27 k^3 by {symbolic}"
        error = abs(second_system_determinant(0))
        for value in range(1, 7):
            det = second_system_determinant(value)
            if abs(det) < 1.0:
                return float("inf"), f"determinant vanishes at k={value}"
            error = max(error, abs(det + 27 * value**3) / (27 * value**3))
        return error, "det = -27 k^3, zero only at k = 0"

    def check_curvature_left_invariance(self) -> Tuple[float, str]:
        rng = np.random.default_rng(self.seed + 7)
        eye = np.eye(3)
        error = 0.0
        for p in _random_group_points(rng, 20):
            x = rng.uniform(-0.5, 0.5, size=3)
            y = _cone_sample(rng, x)
            moved = heisenberg_multiply(p, HeisenbergPoint.of(x)).as_array()
            i, j = PAIRS[int(rng.integers(0, 3))]
            X, Y = eye[i - 1], eye[j - 1]
            here = curvature_field(self.kernel, x, X, Y)(y)
            there = curvature_field(
                self.kernel,
                moved,
                left_translation_differential(p, X),
                left_translation_differential(p, Y),
            )(left_translation_differential(p, y))
            expected = left_translation_differential(p, here)
            error = max(error, float(np.max(np.abs(there - expected)) / max(np.max(np.abs(expected)), 1e-300)))
        return error, "r at (p.x, dL y) is dL of r at (x, y) for 20 random p"

    def check_oracle(self) -> Tuple[float, str]:
        """Oracle y-partials of F up to order 3 against sympy derivatives of the closed form."""
        xs = sympy.symbols("x1:4")
        ys = sympy.symbols("y1:4")
        F = (ys[0] * (ys[1] - xs[0] * ys[2]) * ys[2]) ** sympy.Rational(2, 3)
        oracle = DerivativeOracle(self.kernel, method=self.method, tolerances=self.tolerances)
        rng = np.random.default_rng(self.seed + 8)
        betas = [(1, 0, 0), (0, 2, 0), (1, 1, 0), (1, 1, 1), (0, 1, 2), (3, 0, 0)]
        error = 0.0
        for _ in range(4):
            x = rng.uniform(-0.5, 0.5, size=3)
            y = _cone_sample(rng, x)
            substitution = dict(zip(xs + ys, [*x, *y]))
            for beta in betas:
                derivative = F
                for index, count in enumerate(beta):
                    if count:
                        derivative = sympy.diff(derivative, ys[index], count)
                exact = float(derivative.evalf(subs=substitution, n=30))
                value = oracle.partial(TangentSample.of(x, y), (0, 0, 0), beta)
                error = max(error, abs(value - exact) / max(abs(exact), 1.0))
        return error, f"derivative oracle ({self.method}) up to order 3"

    def run_all(self) -> Tuple[bool, List[AppendixCheck]]:
        results = []
        for name, tolerance, check in self.checks():
            logger.info(f"Running appendix check '{name}'")
            try:
                error, detail = check()
                passed = bool(error <= tolerance)
            except FinslerError as e:
                error, detail, passed = float(getattr(e, "max_error", None) or np.inf), str(e), False
            results.append(AppendixCheck(name, passed, float(error), tolerance, detail))
            if not passed:
                logger.warning(f"Appendix check '{name}' failed: error {error:.3e} > {tolerance:.1e}")
        return all(r.passed for r in results), results


def first_failure(checks: List[AppendixCheck]) -> Optional[AppendixCheck]:
    return next((c for c in checks if not c.passed), None)


def create_verification_report(checks: List[AppendixCheck]) -> str:
    """Aligned text table of the checks, in run order."""
    width = max(len(c.name) for c in checks) if checks else 0
    lines = ["# Heisenberg appendix verification", ""]
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        lines.append(f"{c.name:<{width}}  {status}  max_error={c.max_error:.3e}  tol={c.tolerance:.1e}")
    failed = first_failure(checks)
    lines.append("")
    lines.append(f"First failing check: {failed.name}" if failed else "All checks passed")
    return "\n".join(lines)
