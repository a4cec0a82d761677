"""
Error Types
===========
Exception hierarchy shared by the curve, hull, distance and query modules.

Every library error derives from ProximityError so callers (the CLI in
particular) can separate numerical/validation failures from bugs.
"""

from typing import Optional


class ProximityError(Exception):
    """Base class for all curve proximity errors."""


class CurveDomainError(ProximityError, ValueError):
    """A parameter or interval lies outside the curve's domain."""

    def __init__(self, t: float, lo: float, hi: float):
        super().__init__(f"parameter {t!r} outside domain [{lo!r}, {hi!r}]")
        self.t = t
        self.lo = lo
        self.hi = hi


class DegenerateIntervalError(ProximityError):
    """Raised when a zero-length interval is asked to split."""


class ConstantCurveError(ProximityError, ValueError):
    """The curve is a constant map on its domain."""


class UnsupportedCapabilityError(ProximityError):
    """The curve does not provide the requested closed form."""


class DimensionMismatchError(ProximityError, ValueError):
    """Shapes or curves of different dimension were combined."""


class QuadratureError(ProximityError):
    """Adaptive quadrature did not reach tolerance within its panel budget."""

    def __init__(self, message: str, estimate: float, error_estimate: float):
        super().__init__(f"{message} (estimate={estimate!r}, error={error_estimate!r})")
        self.estimate = estimate
        self.error_estimate = error_estimate


class HullConsistencyError(ProximityError):
    """The arc-length bound came out shorter than the chord."""


class GJKConvergenceError(ProximityError):
    """GJK hit its iteration cap; carries the best bounds found so far."""

    def __init__(self, lower: float, upper: float, witness=None):
        super().__init__(
            f"GJK did not converge: distance in [{lower!r}, {upper!r}]"
        )
        self.lower = lower
        self.upper = upper
        self.witness = witness


class IndeterminateError(ProximityError):
    """A predicate query ran out of iterations before deciding."""

    def __init__(
        self,
        lower: float,
        upper: float,
        iterations: int,
        delta: Optional[float] = None,
    ):
        target = "collision" if delta is None else f"tolerance {delta!r}"
        super().__init__(
            f"{target} undecided after {iterations} iterations: "
            f"distance in [{lower!r}, {upper!r}]"
        )
        self.lower = lower
        self.upper = upper
        self.iterations = iterations
        self.delta = delta
