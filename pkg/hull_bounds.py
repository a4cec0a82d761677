"""
Hull Bounds Module
==================
Convex hull of a curve segment built from the arc-length upper bound.

For Q = [alpha, beta] the set

    U_Q = { x : |psi(alpha) - x| + |x - psi(beta)| <= u(Q) }

contains every point psi(t), t in Q. It is a prolate spheroid with foci at
the segment endpoints (an ellipse in the plane, an interval on the line, a
ball when the foci coincide).

Key Geometry:
- semi-major a = u(Q) / 2
- focal half-distance c = |psi(alpha) - psi(beta)| / 2
- semi-minor b = sqrt(a^2 - c^2)  (half-lengths throughout)
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from curve_core import (
    DEFAULT_QUADRATURE,
    CurveSegment,
    QuadratureConfig,
    Tolerances,
)
from errors import DimensionMismatchError, HullConsistencyError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SpheroidHull:
    """Prolate spheroid stored as two foci and the major-axis length."""
    focus_a: np.ndarray
    focus_b: np.ndarray
    major_length: float
    clamped: bool = False  # major_length was raised to the chord by roundoff

    def __post_init__(self):
        fa = np.array(self.focus_a, dtype=float).ravel()
        fb = np.array(self.focus_b, dtype=float).ravel()
        if fa.shape != fb.shape:
            raise DimensionMismatchError(
                f"hull foci differ in dimension: {fa.shape[0]} vs {fb.shape[0]}"
            )
        if self.major_length < 0:
            raise ValueError(f"major_length must be non-negative, got {self.major_length}")
        fa.setflags(write=False)
        fb.setflags(write=False)
        object.__setattr__(self, "focus_a", fa)
        object.__setattr__(self, "focus_b", fb)
        object.__setattr__(self, "major_length", float(self.major_length))

    @property
    def dimension(self) -> int:
        return self.focus_a.shape[0]

    @property
    def center(self) -> np.ndarray:
        return (self.focus_a + self.focus_b) / 2

    @property
    def chord(self) -> float:
        return float(np.linalg.norm(self.focus_b - self.focus_a))

    @property
    def semi_major(self) -> float:
        return self.major_length / 2

    @property
    def focal_half_distance(self) -> float:
        return self.chord / 2

    @property
    def semi_minor(self) -> float:
        a, c = self.semi_major, self.focal_half_distance
        return float(np.sqrt(max(0.0, a * a - c * c)))

    @property
    def is_ball(self) -> bool:
        return self.chord < Tolerances.DEGENERATE_AXIS

    @property
    def axis(self) -> np.ndarray:
        """Unit major axis; the first canonical vector for a ball."""
        if self.is_ball:
            e = np.zeros(self.dimension)
            e[0] = 1.0
            return e
        return (self.focus_b - self.focus_a) / self.chord

    def contains(self, x, slack: float = 0.0) -> bool:
        if slack < 0:
            raise ValueError(f"slack must be non-negative, got {slack}")
        x = np.asarray(x, dtype=float)
        total = np.linalg.norm(self.focus_a - x) + np.linalg.norm(x - self.focus_b)
        return bool(total <= self.major_length + slack)

    def support(self, direction) -> np.ndarray:
        """Point of the hull maximizing <direction, x>."""
        v = np.asarray(direction, dtype=float)
        norm_v = np.linalg.norm(v)
        if norm_v == 0 or not np.isfinite(norm_v):
            raise ValueError("support direction must be a non-zero finite vector")
        m = self.center
        a = self.semi_major
        if self.is_ball:
            return m + a * v / norm_v
        b = self.semi_minor
        e = self.axis
        along = float(e @ v)
        across = v - along * e
        denom = np.sqrt(a * a * along * along + b * b * float(across @ across))
        if denom == 0.0:
            # flat hull with direction normal to the axis: the whole chord ties
            return m.copy()
        return m + (a * a * along * e + b * b * across) / denom

    def to_dict(self) -> dict:
        return {
            "focus_a": self.focus_a.tolist(),
            "focus_b": self.focus_b.tolist(),
            "major_length": self.major_length,
        }


def hull_from_bound(focus_a, focus_b, upper_bound: float) -> SpheroidHull:
    """Assemble a hull, clamping a bound that undershoots the chord by roundoff."""
    focus_a = np.asarray(focus_a, dtype=float)
    focus_b = np.asarray(focus_b, dtype=float)
    chord = float(np.linalg.norm(focus_b - focus_a))
    if upper_bound >= chord:
        return SpheroidHull(focus_a, focus_b, upper_bound)
    shortfall = chord - upper_bound
    if shortfall <= Tolerances.HULL_CLAMP_RELATIVE * max(1.0, upper_bound):
        logger.debug(
            "hull bound %.17g below chord %.17g by %.3g; clamped to chord",
            upper_bound, chord, shortfall,
        )
        return SpheroidHull(focus_a, focus_b, chord, clamped=True)
    raise HullConsistencyError(
        f"arc-length bound {upper_bound!r} is shorter than chord {chord!r}"
    )


def hull(segment: CurveSegment,
         quadrature_cfg: Optional[QuadratureConfig] = None) -> SpheroidHull:
    """Spheroid hull U_Q of a curve segment; always contains the segment's trace."""
    cfg = quadrature_cfg or DEFAULT_QUADRATURE
    return hull_from_bound(segment.start, segment.end, segment.upper_bound(cfg))


def contains(h: SpheroidHull, x, slack: float = 0.0) -> bool:
    return h.contains(x, slack)


def support(h: SpheroidHull, direction) -> np.ndarray:
    return h.support(direction)
