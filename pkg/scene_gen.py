"""
Scene Generator Module
======================
Named test curves and seeded random scenes for queries, benchmarks and
the replanning demo.

Key Pieces:
- Curve catalog: circle, ellipse, cubic, rational, heart, ranunculoid,
  fish, Lissajous, helix, Euler spiral, circle involute; `translated` moves
  a trig curve
- Random quintic (or any order) Bezier curves and convex polygons
- SceneGenerator: reproducible instance sets from a Philox stream

Custom-backed catalog curves are assembled from module-level functions and
functools.partial so that they survive pickling into worker processes.
"""

import logging
from functools import partial
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import ConvexHull, QhullError
from scipy.special import fresnel

from convex_distance import PolytopeObstacle
from curve_core import (
    BezierCurve,
    CurveSpec,
    CustomCurve,
    Interval,
    PowerCurve,
    TrigCurve,
    TrigTerm,
)

logger = logging.getLogger(__name__)

TWO_PI = 2 * np.pi

Box = Tuple[Sequence[float], Sequence[float]]


def philox_rng(seed: int) -> np.random.Generator:
    """Counter-based 64-bit generator; streams are reproducible across platforms."""
    return np.random.Generator(np.random.Philox(seed))


# ============================================================================
# Catalog: trigonometric and polynomial curves
# ============================================================================

def unit_circle() -> TrigCurve:
    """(cos t, sin t) on [0, 2 pi]."""
    return TrigCurve(2, [TrigTerm(0, amplitude_cos=1.0), TrigTerm(1, amplitude_sin=1.0)],
                     Interval(0.0, TWO_PI))


def ellipse(a: float = 2.0, b: float = 1.0) -> TrigCurve:
    return TrigCurve(2, [TrigTerm(0, amplitude_cos=a), TrigTerm(1, amplitude_sin=b)],
                     Interval(0.0, TWO_PI))


def cubic_power() -> PowerCurve:
    """(t^3 + t, t) on [-1, 1]."""
    return PowerCurve([[0.0, 1.0, 0.0, 1.0], [0.0, 1.0]], Interval(-1.0, 1.0))


def heart(scale: float = 0.1) -> TrigCurve:
    """
    x = 16 sin^3 t, y = 13 cos t - 5 cos 2t - 2 cos 3t - cos 4t, scaled.

    sin^3 t = (3 sin t - sin 3t) / 4.
    """
    s = float(scale)
    terms = [
        TrigTerm(0, amplitude_sin=12.0 * s, frequency=1.0),
        TrigTerm(0, amplitude_sin=-4.0 * s, frequency=3.0),
        TrigTerm(1, amplitude_cos=13.0 * s, frequency=1.0),
        TrigTerm(1, amplitude_cos=-5.0 * s, frequency=2.0),
        TrigTerm(1, amplitude_cos=-2.0 * s, frequency=3.0),
        TrigTerm(1, amplitude_cos=-1.0 * s, frequency=4.0),
    ]
    return TrigCurve(2, terms, Interval(0.0, TWO_PI))


def ranunculoid(scale: float = 1.0) -> TrigCurve:
    """Five-cusped epicycloid (6 cos t - cos 6t, 6 sin t - sin 6t)."""
    s = float(scale)
    terms = [
        TrigTerm(0, amplitude_cos=6.0 * s, frequency=1.0),
        TrigTerm(0, amplitude_cos=-1.0 * s, frequency=6.0),
        TrigTerm(1, amplitude_sin=6.0 * s, frequency=1.0),
        TrigTerm(1, amplitude_sin=-1.0 * s, frequency=6.0),
    ]
    return TrigCurve(2, terms, Interval(0.0, TWO_PI))


def fish() -> TrigCurve:
    """
    x = cos t - sin^2 t / sqrt 2, y = cos t sin t.

    sin^2 t = (1 - cos 2t) / 2 and cos t sin t = sin 2t / 2.
    """
    k = 1.0 / (2.0 * np.sqrt(2.0))
    terms = [
        TrigTerm(0, amplitude_cos=1.0, frequency=1.0),
        TrigTerm(0, amplitude_cos=k, frequency=2.0),
        TrigTerm(1, amplitude_sin=0.5, frequency=2.0),
    ]
    return TrigCurve(2, terms, Interval(0.0, TWO_PI), affine=[[-k, 0.0], [0.0, 0.0]])


def lissajous(a: float = 3.0, b: float = 2.0, phase: float = np.pi / 2) -> TrigCurve:
    """(sin(a t + phase), sin(b t))."""
    terms = [
        TrigTerm(0, amplitude_sin=1.0, frequency=a, phase=phase),
        TrigTerm(1, amplitude_sin=1.0, frequency=b),
    ]
    return TrigCurve(2, terms, Interval(0.0, TWO_PI))


def translated(curve: TrigCurve, offset: Sequence[float]) -> TrigCurve:
    """The same trig curve moved by `offset`."""
    shift = np.zeros((curve.dimension, 2))
    shift[:, 0] = np.asarray(offset, dtype=float).reshape(curve.dimension)
    return TrigCurve(curve.dimension, curve.terms, curve.domain, affine=curve.affine + shift)


def helix(radius: float = 1.0, pitch: float = 0.2, turns: float = 2.0) -> TrigCurve:
    """(r cos t, r sin t, pitch t) in R^3."""
    terms = [TrigTerm(0, amplitude_cos=radius), TrigTerm(1, amplitude_sin=radius)]
    affine = [[0.0, 0.0], [0.0, 0.0], [0.0, pitch]]
    return TrigCurve(3, terms, Interval(0.0, TWO_PI * turns), affine=affine)


# ============================================================================
# Catalog: custom curves with closed-form speed-squared antiderivatives
# ============================================================================

def _rational_position(t: float) -> np.ndarray:
    return np.array([1.0 / (t + 1.0), t])


def _rational_velocity(t: float) -> np.ndarray:
    return np.array([-1.0 / (t + 1.0) ** 2, 1.0])


def _rational_antiderivative(t: float) -> float:
    # speed^2 = (t + 1)^-4 + 1
    return t - 1.0 / (3.0 * (t + 1.0) ** 3)


def rational() -> CustomCurve:
    """((t + 1)^-1, t) on [0, 1]."""
    return CustomCurve(_rational_position, _rational_velocity, 2, Interval(0.0, 1.0),
                       antiderivative=_rational_antiderivative, name="rational")


def _euler_position(t: float) -> np.ndarray:
    # scipy's fresnel uses cos(pi s^2 / 2); rescale to unit speed
    root = np.sqrt(np.pi)
    s, c = fresnel(t / root)
    return np.array([root * c, root * s])


def _euler_velocity(t: float) -> np.ndarray:
    return np.array([np.cos(t * t / 2.0), np.sin(t * t / 2.0)])


def _unit_speed_antiderivative(t: float) -> float:
    return t


def euler_spiral(half_span: float = TWO_PI) -> CustomCurve:
    """Clothoid with unit speed, curvature growing linearly in t."""
    return CustomCurve(_euler_position, _euler_velocity, 2, Interval(-half_span, half_span),
                       antiderivative=_unit_speed_antiderivative, name="euler_spiral")


def _rotation(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def _involute_position(t: float, offset: Tuple[float, float], rotation: float) -> np.ndarray:
    p = np.array([np.cos(t) + t * np.sin(t), np.sin(t) - t * np.cos(t)])
    return _rotation(rotation) @ p + np.asarray(offset, dtype=float)


def _involute_velocity(t: float, rotation: float) -> np.ndarray:
    return _rotation(rotation) @ np.array([t * np.cos(t), t * np.sin(t)])


def _involute_antiderivative(t: float) -> float:
    # speed^2 = t^2
    return t ** 3 / 3.0


def circle_involute(offset: Sequence[float] = (0.0, 0.0), rotation: float = 0.0,
                    turns: float = 1.0) -> CustomCurve:
    """Involute of the unit circle, rigidly moved by rotation then offset."""
    offset = (float(offset[0]), float(offset[1]))
    return CustomCurve(
        partial(_involute_position, offset=offset, rotation=float(rotation)),
        partial(_involute_velocity, rotation=float(rotation)),
        2,
        Interval(0.0, TWO_PI * turns),
        antiderivative=_involute_antiderivative,
        name="circle_involute",
    )


CATALOG: Dict[str, Callable[..., CurveSpec]] = {
    "unit_circle": unit_circle,
    "ellipse": ellipse,
    "cubic_power": cubic_power,
    "rational": rational,
    "heart": heart,
    "ranunculoid": ranunculoid,
    "fish": fish,
    "lissajous": lissajous,
    "helix": helix,
    "euler_spiral": euler_spiral,
    "circle_involute": circle_involute,
}


def catalog_curve(name: str, **params) -> CurveSpec:
    """Build a catalog curve by name."""
    try:
        factory = CATALOG[name]
    except KeyError:
        raise ValueError(f"unknown catalog curve {name!r}; choose from {sorted(CATALOG)}") from None
    return factory(**params)


# ============================================================================
# Random shapes
# ============================================================================

def _box(box: Box) -> Tuple[np.ndarray, np.ndarray]:
    lo = np.asarray(box[0], dtype=float)
    hi = np.asarray(box[1], dtype=float)
    if lo.shape != hi.shape or np.any(lo > hi):
        raise ValueError(f"box corners must share a dimension with lo <= hi: {box}")
    return lo, hi


def random_bezier(order: int, box: Box, rng: np.random.Generator,
                  start: Optional[Sequence[float]] = None,
                  goal: Optional[Sequence[float]] = None) -> BezierCurve:
    """
    Bezier curve whose control points are uniform in `box`.

    When given, `start` and `goal` pin the first and last control points and
    only the order - 1 interior points are drawn.
    """
    if order < 1:
        raise ValueError(f"Bezier order must be at least 1, got {order}")
    lo, hi = _box(box)
    points = rng.uniform(lo, hi, size=(order + 1, lo.shape[0]))
    if start is not None:
        points[0] = start
    if goal is not None:
        points[-1] = goal
    return BezierCurve(points)


def random_convex_polygon(n: int, box: Box, rng: np.random.Generator) -> PolytopeObstacle:
    """Convex hull of n uniform points in a 2-D box, vertices counter-clockwise."""
    if n < 3:
        raise ValueError(f"a polygon needs at least 3 points, got {n}")
    lo, hi = _box(box)
    if lo.shape[0] != 2:
        raise ValueError("random_convex_polygon draws planar polygons only")
    while True:
        points = rng.uniform(lo, hi, size=(n, 2))
        try:
            hull = ConvexHull(points)
        except QhullError:  # collinear draw
            continue
        return PolytopeObstacle(points[hull.vertices])


# ============================================================================
# Scene generation
# ============================================================================

class SceneGenerator:
    """
    Reproducible random instance sets.

    Every instance set is drawn from a fresh Philox stream keyed by the
    generator seed, so the same seed always yields the same instances.
    """

    def __init__(self, seed: int = 42, box: Box = ((-1.0, -1.0), (1.0, 1.0))):
        self.seed = seed
        self.box = box

    def _rng(self) -> np.random.Generator:
        return philox_rng(self.seed)

    def curve_polygon_instances(
        self,
        count: int,
        order: int = 5,
        vertices: int = 6,
        obstacle_box: Box = ((1.5, -1.0), (3.0, 1.0)),
    ) -> List[Tuple[BezierCurve, PolytopeObstacle]]:
        """Bezier curves paired with polygons drawn from a separate box."""
        rng = self._rng()
        return [
            (random_bezier(order, self.box, rng), random_convex_polygon(vertices, obstacle_box, rng))
            for _ in range(count)
        ]

    def curve_curve_instances(
        self,
        count: int,
        order: int = 5,
        shift: Sequence[float] = (2.5, 0.0),
    ) -> List[Tuple[BezierCurve, BezierCurve]]:
        """Pairs of Bezier curves, the second drawn from the box moved by `shift`."""
        rng = self._rng()
        lo, hi = _box(self.box)
        moved = (lo + np.asarray(shift), hi + np.asarray(shift))
        return [
            (random_bezier(order, self.box, rng), random_bezier(order, moved, rng))
            for _ in range(count)
        ]

    def replan_curves(self, count: int, start: Sequence[float], goal: Sequence[float],
                      order: int = 5) -> List[BezierCurve]:
        """Trajectories from start to goal with random interior control points."""
        rng = self._rng()
        return [random_bezier(order, self.box, rng, start=start, goal=goal) for _ in range(count)]
