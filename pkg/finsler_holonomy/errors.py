"""Exception hierarchy for Finsler Holonomy.

Every error carries the process exit code the CLI reports for it:
1 verification failure, 2 configuration error, 3 numeric or domain error.
"""

from typing import Any, Dict, Optional, Sequence

import numpy as np


class FinslerError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 3

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ConfigurationError(FinslerError):
    """Invalid run configuration, kernel file, or argument combination."""

    exit_code = 2


class DomainError(FinslerError):
    """A tangent sample lies outside the kernel's smoothness cone."""

    def __init__(
        self,
        message: str,
        x: Optional[Sequence[float]] = None,
        y: Optional[Sequence[float]] = None,
    ):
        super().__init__(message)
        self.x = None if x is None else np.asarray(x, dtype=float).tolist()
        self.y = None if y is None else np.asarray(y, dtype=float).tolist()


class UnsupportedOrderError(FinslerError):
    """Requested derivative order exceeds what the oracle supports."""

    def __init__(self, message: str, order: int, max_order: int):
        super().__init__(message)
        self.order = order
        self.max_order = max_order


class DegenerateMetricError(FinslerError):
    """Fundamental tensor is singular at a sample."""

    def __init__(self, message: str, sigma_min: float, sigma_max: float):
        super().__init__(message)
        self.sigma_min = sigma_min
        self.sigma_max = sigma_max


class NonPositiveValueError(FinslerError):
    """F(x, y) <= 0 where a positive value is required."""

    def __init__(self, message: str, value: float):
        super().__init__(message)
        self.value = value


class SamplingCoverageError(FinslerError):
    """The cone is too thin for the sampler to fill the requested count."""

    def __init__(self, message: str, acceptance_rate: float, accepted: int, requested: int):
        super().__init__(message)
        self.acceptance_rate = acceptance_rate
        self.accepted = accepted
        self.requested = requested


class SelfConsistencyError(FinslerError):
    """A computed object violates an identity it must satisfy."""

    def __init__(self, message: str, defect: float, tolerance: float):
        super().__init__(message)
        self.defect = defect
        self.tolerance = tolerance


class TransportDomainError(FinslerError):
    """Parallel transport left the cone at curve parameter t_star."""

    def __init__(self, message: str, t_star: float, sample_index: Optional[int] = None):
        super().__init__(message)
        self.t_star = t_star
        self.sample_index = sample_index


class CommutatorStepError(TransportDomainError):
    """A commutator loop left the cone; a smaller t is needed."""


class CompositionError(FinslerError):
    """Holonomy elements cannot be composed."""


class ValidationError(FinslerError):
    """An argument fails a structural precondition."""


class ConsistencyError(FinslerError):
    """A verification check failed."""

    exit_code = 1

    def __init__(
        self,
        message: str,
        check: str,
        max_error: Optional[float] = None,
        data: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(message)
        self.check = check
        self.max_error = max_error
        # section payload to keep in the report even though the check failed
        self.data = data
