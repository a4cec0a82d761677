"""
Convex Distance Module
======================
Euclidean distance between convex shapes through their support mappings
(Gilbert-Johnson-Keerthi), plus the segment bound functions built on it.

Key Pieces:
- Convex obstacles: point, polytope (vertex list), ball, spheroid hull
- gjk_distance: certified distance with witness points and a duality-gap
  lower bound, valid in any dimension
- d_lb / d_ub: lower and upper bounds on the separating distance between a
  curve segment and an obstacle (or another segment)
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Protocol, Tuple, Union, runtime_checkable

import numpy as np

from curve_core import CurveSegment
from errors import DimensionMismatchError, GJKConvergenceError
from hull_bounds import SpheroidHull, hull

logger = logging.getLogger(__name__)

GJK_TOLERANCE = 1e-12
GJK_MAX_ITERATIONS = 1000
GJK_DEGENERATE = 1e-14


# ============================================================================
# Obstacles
# ============================================================================

@runtime_checkable
class SupportMapped(Protocol):
    """Anything GJK can query: a dimension, an interior point and a support map."""

    @property
    def dimension(self) -> int:
        ...

    @property
    def center(self) -> np.ndarray:
        ...

    def support(self, direction) -> np.ndarray:
        ...


def _check_direction(direction) -> np.ndarray:
    v = np.asarray(direction, dtype=float)
    norm_v = np.linalg.norm(v)
    if norm_v == 0 or not np.isfinite(norm_v):
        raise ValueError("support direction must be a non-zero finite vector")
    return v


def _vector(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError(f"{name} must be a non-empty vector")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PointObstacle:
    """A single point."""
    p: np.ndarray
    kind: str = field(default="point", init=False)

    def __post_init__(self):
        object.__setattr__(self, "p", _vector(self.p, "point"))

    @property
    def dimension(self) -> int:
        return self.p.shape[0]

    @property
    def center(self) -> np.ndarray:
        return self.p

    def support(self, direction) -> np.ndarray:
        _check_direction(direction)
        return self.p

    def to_dict(self) -> dict:
        return {"type": self.kind, "p": self.p.tolist()}


@dataclass(frozen=True, eq=False)
class PolytopeObstacle:
    """Convex hull of a vertex list."""
    vertices: np.ndarray
    kind: str = field(default="polytope", init=False)

    def __post_init__(self):
        verts = np.array(self.vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[0] == 0:
            raise ValueError("polytope needs a non-empty list of equal-length vertices")
        verts.setflags(write=False)
        object.__setattr__(self, "vertices", verts)

    @property
    def dimension(self) -> int:
        return self.vertices.shape[1]

    @property
    def center(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def support(self, direction) -> np.ndarray:
        v = _check_direction(direction)
        # argmax keeps the first maximum: lowest index wins ties
        return self.vertices[int(np.argmax(self.vertices @ v))]

    def to_dict(self) -> dict:
        return {"type": self.kind, "vertices": self.vertices.tolist()}


@dataclass(frozen=True, eq=False)
class BallObstacle:
    """Closed ball."""
    ball_center: np.ndarray
    radius: float
    kind: str = field(default="ball", init=False)

    def __post_init__(self):
        object.__setattr__(self, "ball_center", _vector(self.ball_center, "center"))
        if not self.radius >= 0:
            raise ValueError(f"ball radius must be non-negative, got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dimension(self) -> int:
        return self.ball_center.shape[0]

    @property
    def center(self) -> np.ndarray:
        return self.ball_center

    def support(self, direction) -> np.ndarray:
        v = _check_direction(direction)
        return self.ball_center + self.radius * v / np.linalg.norm(v)

    def to_dict(self) -> dict:
        return {"type": self.kind, "center": self.ball_center.tolist(), "radius": self.radius}


ConvexObstacle = Union[PointObstacle, PolytopeObstacle, BallObstacle, SpheroidHull]


def support_obstacle(o: ConvexObstacle, direction) -> np.ndarray:
    """Farthest point of `o` along `direction`."""
    return o.support(direction)


def obstacle_to_dict(o: ConvexObstacle) -> dict:
    if isinstance(o, SpheroidHull):
        return {"type": "spheroid", **o.to_dict()}
    return o.to_dict()


# ============================================================================
# GJK
# ============================================================================

@dataclass(frozen=True, eq=False)
class DistanceWitness:
    """Distance between two shapes and the points realizing it."""
    distance: float
    point_a: np.ndarray
    point_b: np.ndarray
    lower_bound: Optional[float] = None  # duality-gap certificate, <= distance
    iterations: int = 0

    def __post_init__(self):
        if self.lower_bound is None:
            object.__setattr__(self, "lower_bound", self.distance)


def _cofactors(G: np.ndarray) -> Dict[int, Dict[int, float]]:
    """Johnson cofactors Delta_i(X) for every face X of the simplex, keyed by bitmask."""
    k = G.shape[0]
    deltas: Dict[int, Dict[int, float]] = {1 << i: {i: 1.0} for i in range(k)}
    for mask in range(1, 1 << k):
        if mask in deltas:
            continue
        members = [i for i in range(k) if mask >> i & 1]
        cof = {}
        for j in members:
            face = deltas[mask ^ (1 << j)]
            base = min(face)
            cof[j] = sum(d_i * (G[i, base] - G[i, j]) for i, d_i in face.items())
        deltas[mask] = cof
    return deltas


def _closest_on_simplex(W: np.ndarray) -> Tuple[np.ndarray, np.ndarray, Tuple[int, ...]]:
    """
    Point of conv(W) nearest the origin (Johnson's distance subalgorithm).

    A face X is the answer when all its cofactors are positive and adding
    any other vertex j gives Delta_j(X + j) <= 0. Faces holding the newest
    vertex (the last row) are tested first. When roundoff leaves no face
    passing both tests, the nearest face with positive cofactors is used.
    Returns (point, weights, face indices).
    """
    k = W.shape[0]
    deltas = _cofactors(W @ W.T)
    newest = 1 << (k - 1)
    order = sorted(deltas, key=lambda m: (not m & newest, bin(m).count("1")))

    def solution(mask: int):
        idx = tuple(sorted(deltas[mask]))
        cof = np.array([deltas[mask][i] for i in idx])
        lam = cof / cof.sum()
        return lam @ W[list(idx)], lam, idx

    fallback = None
    for mask in order:
        cof = deltas[mask]
        if any(d_i <= 0.0 for d_i in cof.values()):
            continue
        outside = [j for j in range(k) if not mask >> j & 1]
        if all(deltas[mask | 1 << j][j] <= 0.0 for j in outside):
            return solution(mask)
        point, lam, idx = solution(mask)
        norm_sq = float(point @ point)
        if fallback is None or norm_sq < fallback[0]:
            fallback = (norm_sq, point, lam, idx)
    if fallback is None:
        # every face degenerate: keep the nearest vertex
        i = int(np.argmin(np.einsum("ij,ij->i", W, W)))
        return W[i], np.ones(1), (i,)
    return fallback[1], fallback[2], fallback[3]


def gjk_distance(A: SupportMapped, B: SupportMapped, tol: float = GJK_TOLERANCE,
                 max_iterations: int = GJK_MAX_ITERATIONS) -> DistanceWitness:
    """
    Minimum distance between convex shapes A and B.

    Iterates on the Minkowski difference A - B. Stops when the duality gap
    |v| - <v, w>/|v| drops to `tol`, when no new support point appears, or
    when the origin is enclosed (distance 0, coincident witnesses).

    Raises:
        GJKConvergenceError: after `max_iterations`, with best bounds so far
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if A.dimension != B.dimension:
        raise DimensionMismatchError(
            f"cannot measure distance between {A.dimension}-D and {B.dimension}-D shapes"
        )

    direction = np.asarray(A.center, dtype=float) - np.asarray(B.center, dtype=float)
    if not np.any(direction):
        direction = np.zeros(A.dimension)
        direction[0] = 1.0
    sa = [np.asarray(A.support(-direction), dtype=float)]
    sb = [np.asarray(B.support(direction), dtype=float)]
    W = np.array([sa[0] - sb[0]])
    SA, SB = np.array(sa), np.array(sb)
    lam = np.ones(1)
    v = W[0]
    lower = 0.0
    scale = max(1.0, float(np.abs(W).max()))

    for iteration in range(1, max_iterations + 1):
        v_norm = float(np.linalg.norm(v))
        if v_norm <= GJK_DEGENERATE * scale:
            contact = (lam @ SA + lam @ SB) / 2
            return DistanceWitness(0.0, contact, contact.copy(), 0.0, iteration)

        a = np.asarray(A.support(-v), dtype=float)
        b = np.asarray(B.support(v), dtype=float)
        w = a - b
        scale = max(scale, float(np.abs(w).max()))
        lower = max(lower, float(v @ w) / v_norm)
        gap = v_norm - lower
        if gap <= tol or gap <= GJK_DEGENERATE * v_norm:
            break
        if np.any(np.all(np.abs(W - w) <= GJK_DEGENERATE * scale, axis=1)):
            # no new support point; v is as close as this simplex gets
            break

        W = np.vstack([W, w])
        SA = np.vstack([SA, a])
        SB = np.vstack([SB, b])
        v, lam, keep = _closest_on_simplex(W)
        keep = list(keep)
        W, SA, SB = W[keep], SA[keep], SB[keep]
    else:
        witness = DistanceWitness(v_norm, lam @ SA, lam @ SB, max(lower, 0.0), max_iterations)
        logger.debug("GJK hit %d iterations with gap %.3g", max_iterations, v_norm - lower)
        raise GJKConvergenceError(max(lower, 0.0), v_norm, witness)

    return DistanceWitness(
        distance=v_norm,
        point_a=lam @ SA,
        point_b=lam @ SB,
        lower_bound=min(max(lower, 0.0), v_norm),
        iterations=iteration,
    )


# ============================================================================
# Segment bounds
# ============================================================================

def _safe_lower(A: SupportMapped, B: SupportMapped, tol: float, max_iterations: int) -> float:
    try:
        return gjk_distance(A, B, tol, max_iterations).lower_bound
    except GJKConvergenceError as exc:
        # the gap certificate stays a valid lower bound
        return exc.lower


def _safe_witness(A: SupportMapped, B: SupportMapped, tol: float,
                  max_iterations: int) -> DistanceWitness:
    try:
        return gjk_distance(A, B, tol, max_iterations)
    except GJKConvergenceError as exc:
        # |v| is realized by a pair of points, so it still bounds from above
        return exc.witness


def d_lb(segment: CurveSegment, o: ConvexObstacle, segment_hull: Optional[SpheroidHull] = None,
         tol: float = GJK_TOLERANCE, max_iterations: int = GJK_MAX_ITERATIONS) -> float:
    """Lower bound on the distance from the segment's trace to `o`."""
    h = segment_hull if segment_hull is not None else hull(segment)
    return _safe_lower(h, o, tol, max_iterations)


def d_ub(segment: CurveSegment, o: ConvexObstacle, tol: float = GJK_TOLERANCE,
         max_iterations: int = GJK_MAX_ITERATIONS) -> DistanceWitness:
    """Distance from the segment's midpoint image to `o` (an upper bound)."""
    x_mid = segment.curve.evaluate(segment.midpoint_parameter)
    return d_point(x_mid, o, tol, max_iterations)


def d_point(x, o: ConvexObstacle, tol: float = GJK_TOLERANCE,
            max_iterations: int = GJK_MAX_ITERATIONS) -> DistanceWitness:
    """Distance from one point on a curve to `o`."""
    return _safe_witness(PointObstacle(x), o, tol, max_iterations)


def d_lb_curves(seg_a: CurveSegment, seg_b: CurveSegment,
                hull_a: Optional[SpheroidHull] = None, hull_b: Optional[SpheroidHull] = None,
                tol: float = GJK_TOLERANCE, max_iterations: int = GJK_MAX_ITERATIONS) -> float:
    """Lower bound on the distance between two segments: hull to hull."""
    ha = hull_a if hull_a is not None else hull(seg_a)
    hb = hull_b if hull_b is not None else hull(seg_b)
    return _safe_lower(ha, hb, tol, max_iterations)


def d_ub_curves(seg_a: CurveSegment, seg_b: CurveSegment) -> DistanceWitness:
    """Distance between the two segments' midpoint images."""
    if seg_a.curve.dimension != seg_b.curve.dimension:
        raise DimensionMismatchError(
            f"cannot compare {seg_a.curve.dimension}-D and {seg_b.curve.dimension}-D curves"
        )
    x = seg_a.curve.evaluate(seg_a.midpoint_parameter)
    y = seg_b.curve.evaluate(seg_b.midpoint_parameter)
    return DistanceWitness(float(np.linalg.norm(x - y)), x, y)
