"""
Sampling Oracle Module
======================
Brute-force reference values on uniform parameter grids.

These functions only evaluate curves and measure single points (GJK, or
edge projection for planar polygons); they share no code with the hull or
branch-and-bound modules.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import ConvexHull, QhullError
from scipy.spatial.distance import cdist

from convex_distance import (
    BallObstacle,
    ConvexObstacle,
    PointObstacle,
    PolytopeObstacle,
    gjk_distance,
)
from curve_core import CurveSpec, Interval

logger = logging.getLogger(__name__)

# rows of the n x n distance grid held in memory at once
GRID_CHUNK = 2048


@dataclass(frozen=True)
class OracleEstimate:
    """A sampled value and how far it may sit above the true minimum."""
    value: float
    slack: float
    samples: int

    def to_dict(self) -> dict:
        return {"value": self.value, "slack": self.slack, "samples": self.samples}


def _grid(curve: CurveSpec, n: int, Q: Optional[Interval] = None) -> np.ndarray:
    if n < 2:
        raise ValueError(f"oracle needs at least 2 samples, got {n}")
    Q = Q or curve.domain
    return np.linspace(Q.lo, Q.hi, n)


def _speed_bound(curve: CurveSpec, ts: np.ndarray) -> float:
    """Largest sampled speed; a sampled stand-in for the Lipschitz constant."""
    speeds = np.linalg.norm(curve.derivative_many(ts), axis=1)
    return float(speeds.max())


def _slack(curve: CurveSpec, ts: np.ndarray) -> float:
    n = ts.shape[0]
    return _speed_bound(curve, ts) * curve.domain.length / (2 * (n - 1))


def _polygon_distances(points: np.ndarray, o: PolytopeObstacle) -> Optional[np.ndarray]:
    """
    Point-to-polygon distances for a batch of planar points.

    Points inside the hull get 0; the rest take the nearest edge. Returns
    None for non-planar or degenerate polytopes.
    """
    if o.dimension != 2 or o.vertices.shape[0] < 3:
        return None
    try:
        hull = ConvexHull(o.vertices)
    except QhullError:
        return None
    ring = o.vertices[hull.vertices]
    starts, ends = ring, np.roll(ring, -1, axis=0)
    out = np.empty(points.shape[0])
    for lo in range(0, points.shape[0], GRID_CHUNK):
        chunk = points[lo:lo + GRID_CHUNK]
        inside = np.all(chunk @ hull.equations[:, :2].T + hull.equations[:, 2] <= 0.0, axis=1)
        ab = ends - starts
        rel = chunk[:, None, :] - starts[None, :, :]
        t = np.clip(np.einsum("pej,ej->pe", rel, ab) / np.einsum("ej,ej->e", ab, ab), 0.0, 1.0)
        gaps = np.linalg.norm(rel - t[:, :, None] * ab[None, :, :], axis=2).min(axis=1)
        out[lo:lo + GRID_CHUNK] = np.where(inside, 0.0, gaps)
    return out


def sampled_min_distance(curve: CurveSpec, o: ConvexObstacle, n: int) -> OracleEstimate:
    """Minimum of the point-to-obstacle distance over n uniform parameters."""
    ts = _grid(curve, n)
    points = curve.evaluate_many(ts)
    if isinstance(o, PointObstacle):
        best = float(np.linalg.norm(points - o.p, axis=1).min())
    elif isinstance(o, BallObstacle):
        best = max(0.0, float(np.linalg.norm(points - o.ball_center, axis=1).min()) - o.radius)
    else:
        planar = _polygon_distances(points, o) if isinstance(o, PolytopeObstacle) else None
        if planar is not None:
            best = float(planar.min())
        else:
            best = np.inf
            for x in points:
                best = min(best, gjk_distance(PointObstacle(x), o).distance)
    slack = _slack(curve, ts)
    logger.debug("sampled min distance %.17g over %d points (slack %.3g)", best, n, slack)
    return OracleEstimate(float(best), slack, n)


def sampled_min_distance_curves(a: CurveSpec, b: CurveSpec, n: int) -> OracleEstimate:
    """Minimum pairwise distance over an n x n grid of parameters."""
    ts_a, ts_b = _grid(a, n), _grid(b, n)
    pa, pb = a.evaluate_many(ts_a), b.evaluate_many(ts_b)
    if pa.shape[1] != pb.shape[1]:
        raise ValueError(f"curves differ in dimension: {pa.shape[1]} vs {pb.shape[1]}")
    best = np.inf
    for start in range(0, n, GRID_CHUNK):
        best = min(best, float(cdist(pa[start:start + GRID_CHUNK], pb).min()))
    return OracleEstimate(best, _slack(a, ts_a) + _slack(b, ts_b), n)


def sampled_arc_length(curve: CurveSpec, Q: Optional[Interval] = None, n: int = 1000) -> float:
    """Chord sum over n uniform subdivisions of Q; approaches s(Q) from below."""
    if n < 1:
        raise ValueError(f"need at least one subdivision, got {n}")
    ts = _grid(curve, n + 1, Q)
    points = curve.evaluate_many(ts)
    return float(np.linalg.norm(np.diff(points, axis=0), axis=1).sum())
