"""Parallel transport, holonomy and commutator loops."""

from .curves import (
    concatenate,
    curve_start,
    inverse_loop,
    is_closed,
    octant_loop,
    parallelogram_loop,
    parse_curve,
    polyline,
    reverse_curve,
    square_loop,
)
from .integrator import (
    commutator_loop_derivative,
    compose,
    drift_convergence,
    holonomy_samples,
    identity_holonomy,
    loop_transport,
    metric_drift,
    octant_rotation,
    reference_holonomy,
    richardson_error,
    tabulate_holonomy,
    transport,
    transport_batch,
)

__all__ = [
    "commutator_loop_derivative",
    "compose",
    "concatenate",
    "curve_start",
    "drift_convergence",
    "holonomy_samples",
    "identity_holonomy",
    "inverse_loop",
    "is_closed",
    "loop_transport",
    "metric_drift",
    "octant_loop",
    "octant_rotation",
    "parallelogram_loop",
    "parse_curve",
    "polyline",
    "reference_holonomy",
    "reverse_curve",
    "richardson_error",
    "square_loop",
    "tabulate_holonomy",
    "transport",
    "transport_batch",
]
