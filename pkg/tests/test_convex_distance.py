"""
Test Suite for Convex Distance Module
=====================================
Tests the GJK engine and the segment bound functions including:
- Obstacle support mappings
- Distances against closed forms and brute force
- Symmetry and translation equivariance
- Lower and upper segment bounds
"""

import pytest
import numpy as np
from hypothesis import given, settings, strategies as st
from scipy.spatial import ConvexHull
from pathlib import Path
import sys

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from convex_distance import (
    BallObstacle,
    DistanceWitness,
    PointObstacle,
    PolytopeObstacle,
    d_lb,
    d_lb_curves,
    d_point,
    d_ub,
    d_ub_curves,
    gjk_distance,
    obstacle_to_dict,
    support_obstacle,
    _closest_on_simplex,
)
from curve_core import BezierCurve, CurveSegment, Interval
from errors import DimensionMismatchError, GJKConvergenceError
from hull_bounds import SpheroidHull
from scene_gen import heart, philox_rng, random_bezier, random_convex_polygon, unit_circle


def _point_segment(p, a, b):
    ab = b - a
    t = np.clip((p - a) @ ab / (ab @ ab), 0.0, 1.0)
    return np.linalg.norm(p - (a + t * ab))


def _polygon_distance(P, R):
    """Brute-force distance between disjoint convex polygons."""
    def edges(V):
        ring = V[ConvexHull(V).vertices]
        return list(zip(ring, np.roll(ring, -1, axis=0)))
    best = np.inf
    for p in P:
        for a, b in edges(R):
            best = min(best, _point_segment(p, a, b))
    for r in R:
        for a, b in edges(P):
            best = min(best, _point_segment(r, a, b))
    return best


def _check_witness(w: DistanceWitness):
    gap = np.linalg.norm(w.point_a - w.point_b)
    assert abs(gap - w.distance) <= 1e-9 * max(1.0, w.distance)
    assert w.lower_bound <= w.distance + 1e-15


class TestObstacles:
    """Tests for obstacle support mappings."""

    def test_point_support(self):
        """Test a point is its own support in every direction."""
        p = PointObstacle([1.0, 2.0])
        np.testing.assert_allclose(support_obstacle(p, [5.0, -1.0]), [1.0, 2.0])

    def test_polytope_support_tie(self):
        """Test ties go to the lowest vertex index."""
        square = PolytopeObstacle([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        np.testing.assert_allclose(square.support([1.0, 0.0]), [1.0, 0.0])

    def test_ball_support(self):
        """Test ball support lies on the sphere along the direction."""
        ball = BallObstacle([0.0, 0.0], 2.0)
        np.testing.assert_allclose(ball.support([3.0, 4.0]), [1.2, 1.6])

    def test_negative_radius(self):
        """Test a negative radius is refused."""
        with pytest.raises(ValueError):
            BallObstacle([0.0, 0.0], -1.0)

    def test_empty_polytope(self):
        """Test an empty vertex list is refused."""
        with pytest.raises(ValueError):
            PolytopeObstacle(np.zeros((0, 2)))

    def test_to_dict(self):
        """Test the obstacle JSON payloads."""
        assert obstacle_to_dict(PointObstacle([1.0, 0.0])) == {"type": "point", "p": [1.0, 0.0]}
        assert obstacle_to_dict(BallObstacle([0.0, 0.0], 1.0))["type"] == "ball"
        assert obstacle_to_dict(SpheroidHull([0.0, 0.0], [1.0, 0.0], 2.0))["type"] == "spheroid"


class TestSimplexStep:
    """Tests for the nearest-point step on a GJK simplex."""

    def test_segment_interior(self):
        """Test the origin projects into the middle of a segment."""
        point, lam, idx = _closest_on_simplex(np.array([[1.0, 1.0], [1.0, -1.0]]))
        np.testing.assert_allclose(point, [1.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(lam, [0.5, 0.5])
        assert idx == (0, 1)

    def test_old_vertex_region(self):
        """Test a new vertex that does not help is dropped."""
        point, lam, idx = _closest_on_simplex(np.array([[1.0, 0.0], [2.0, 1.0]]))
        np.testing.assert_allclose(point, [1.0, 0.0])
        assert idx == (0,)
        np.testing.assert_allclose(lam, [1.0])

    def test_triangle_around_origin(self):
        """Test a triangle enclosing the origin returns the origin."""
        W = np.array([[1.0, 0.0], [-1.0, 1.0], [-1.0, -1.0]])
        point, lam, idx = _closest_on_simplex(W)
        np.testing.assert_allclose(point, [0.0, 0.0], atol=1e-12)
        assert idx == (0, 1, 2)
        assert np.all(lam > 0)

    def test_random_simplices_optimal(self):
        """Test the nearest-point condition on random triangles and tetrahedra."""
        rng = philox_rng(31)
        for dim in (2, 3):
            for _ in range(200):
                W = rng.uniform(-1.0, 1.0, size=(dim + 1, dim)) + rng.uniform(-2.0, 2.0, size=dim)
                point, lam, idx = _closest_on_simplex(W)
                assert np.all(lam >= 0)
                assert lam.sum() == pytest.approx(1.0)
                np.testing.assert_allclose(point, lam @ W[list(idx)], atol=1e-12)
                # v is nearest iff no vertex lies on the origin side of the plane through v
                assert np.all(W @ point - point @ point >= -1e-10)


class TestGJK:
    """Tests for gjk_distance."""

    def test_point_to_square(self):
        """Test a point beside the unit square."""
        square = PolytopeObstacle([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        w = gjk_distance(PointObstacle([2.0, 0.5]), square)
        assert w.distance == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(w.point_b, [1.0, 0.5], atol=1e-12)
        _check_witness(w)

    def test_ball_to_ball(self):
        """Test two balls in 3-D."""
        w = gjk_distance(BallObstacle([0.0, 0.0, 0.0], 1.0), BallObstacle([3.0, 4.0, 0.0], 1.5))
        assert w.distance == pytest.approx(2.5, abs=1e-9)
        _check_witness(w)

    def test_point_to_ellipse(self):
        """Test a point on the major axis of a spheroid hull."""
        h = SpheroidHull([-1.0, 0.0], [1.0, 0.0], 4.0)
        w = gjk_distance(PointObstacle([5.0, 0.0]), h)
        assert w.distance == pytest.approx(3.0, abs=1e-9)

    def test_overlap_is_zero(self):
        """Test overlapping shapes have distance zero and coincident witnesses."""
        square = PolytopeObstacle([[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]])
        w = gjk_distance(BallObstacle([1.0, 1.0], 0.5), square)
        assert w.distance == 0.0
        np.testing.assert_allclose(w.point_a, w.point_b)

    def test_crossing_segments(self):
        """Test two crossing segment polytopes touch."""
        a = PolytopeObstacle([[0.0, 0.0], [1.0, 1.0]])
        b = PolytopeObstacle([[0.0, 1.0], [1.0, 0.0]])
        assert gjk_distance(a, b).distance == pytest.approx(0.0, abs=1e-12)

    def test_against_brute_force(self):
        """Test random disjoint polygon pairs against edge enumeration."""
        rng = philox_rng(9)
        for _ in range(500):
            n, m = rng.integers(3, 9, size=2)
            P = random_convex_polygon(int(n), ((0.0, 0.0), (1.0, 1.0)), rng)
            R = random_convex_polygon(int(m), ((1.5, -0.5), (2.5, 1.5)), rng)
            w = gjk_distance(P, R)
            assert w.distance == pytest.approx(_polygon_distance(P.vertices, R.vertices), abs=1e-9)
            _check_witness(w)

    @settings(max_examples=50, deadline=None)
    @given(
        seed=st.integers(min_value=0, max_value=2**32 - 1),
        shift=st.tuples(st.floats(-100, 100), st.floats(-100, 100)),
    )
    def test_symmetry_and_translation(self, seed, shift):
        """Test d(A, B) == d(B, A) and d(A + s, B + s) == d(A, B)."""
        rng = philox_rng(seed)
        P = random_convex_polygon(5, ((0.0, 0.0), (1.0, 1.0)), rng)
        R = random_convex_polygon(6, ((2.0, 0.0), (3.0, 1.0)), rng)
        s = np.array(shift)
        d = gjk_distance(P, R).distance
        assert gjk_distance(R, P).distance == pytest.approx(d, abs=1e-12)
        moved = gjk_distance(PolytopeObstacle(P.vertices + s), PolytopeObstacle(R.vertices + s))
        assert moved.distance == pytest.approx(d, abs=1e-9)

    def test_dimension_mismatch(self):
        """Test shapes of different dimension are refused."""
        with pytest.raises(DimensionMismatchError):
            gjk_distance(PointObstacle([0.0, 0.0]), PointObstacle([0.0, 0.0, 0.0]))

    def test_iteration_cap(self):
        """Test the cap raises with bracketing bounds and a witness."""
        h = SpheroidHull([-1.0, 0.0], [1.0, 0.0], 4.0)
        with pytest.raises(GJKConvergenceError) as info:
            gjk_distance(PointObstacle([3.0, 3.0]), h, max_iterations=1)
        assert 0.0 <= info.value.lower <= info.value.upper
        assert info.value.witness is not None

    def test_bad_tolerance(self):
        """Test a non-positive tolerance is refused."""
        with pytest.raises(ValueError):
            gjk_distance(PointObstacle([0.0]), PointObstacle([1.0]), tol=0.0)


class TestSegmentBounds:
    """Tests for d_lb and d_ub."""

    @pytest.mark.slow
    def test_sandwich_curve_obstacle(self):
        """Test d_lb <= sampled segment distance <= d_ub."""
        rng = philox_rng(21)
        for _ in range(300):
            curve = random_bezier(5, ((0.0, 0.0), (1.0, 1.0)), rng)
            polygon = random_convex_polygon(6, ((1.2, 0.0), (2.0, 1.0)), rng)
            a, b = np.sort(rng.uniform(0.0, 1.0, 2))
            seg = CurveSegment(curve, Interval(a, b))
            sampled = min(
                gjk_distance(PointObstacle(x), polygon).distance
                for x in curve.evaluate_many(np.linspace(a, b, 400))
            )
            lower = d_lb(seg, polygon)
            upper = d_ub(seg, polygon).distance
            assert lower <= sampled + 1e-9
            assert sampled <= upper + 1e-9

    def test_upper_is_midpoint_distance(self):
        """Test d_ub measures from the midpoint image."""
        seg = CurveSegment(unit_circle(), Interval(0.0, np.pi))
        w = d_ub(seg, PointObstacle([0.0, 3.0]))
        assert w.distance == pytest.approx(2.0, abs=1e-12)
        np.testing.assert_allclose(w.point_a, [0.0, 1.0], atol=1e-15)

    def test_point_distance(self):
        """Test d_point from a curve point to a square."""
        square = PolytopeObstacle([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        w = d_point([2.0, 0.5], square)
        assert w.distance == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(w.point_a, [2.0, 0.5])

    def test_lower_zero_when_hull_touches(self):
        """Test d_lb is zero when the obstacle reaches into the hull."""
        seg = CurveSegment(heart(), Interval(0.0, 1.0))
        assert d_lb(seg, PointObstacle(seg.start)) == pytest.approx(0.0, abs=1e-12)

    def test_curve_pair_bounds(self):
        """Test parallel unit segments one apart."""
        a = BezierCurve([[0.0, 0.0], [1.0, 0.0]])
        b = BezierCurve([[0.0, 1.0], [1.0, 1.0]])
        seg_a, seg_b = CurveSegment(a, a.domain), CurveSegment(b, b.domain)
        assert d_lb_curves(seg_a, seg_b) == pytest.approx(1.0, abs=1e-9)
        assert d_ub_curves(seg_a, seg_b).distance == pytest.approx(1.0, abs=1e-12)

    def test_curve_pair_dimension_mismatch(self):
        """Test curves of different dimension are refused."""
        a = BezierCurve([[0.0, 0.0], [1.0, 0.0]])
        b = BezierCurve([[0.0, 1.0, 0.0], [1.0, 1.0, 0.0]])
        with pytest.raises(DimensionMismatchError):
            d_ub_curves(CurveSegment(a, a.domain), CurveSegment(b, b.domain))


class TestAnalyticDistances:
    """Closed-form GJK checks."""

    def test_point_to_unit_ball(self):
        """Test witnesses of a point outside the unit disc."""
        w = gjk_distance(PointObstacle([2.0, 0.0]), BallObstacle([0.0, 0.0], 1.0))
        assert w.distance == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(w.point_a, [2.0, 0.0])
        np.testing.assert_allclose(w.point_b, [1.0, 0.0], atol=1e-12)

    def test_offset_squares(self):
        """Test unit squares offset by (3, 3) meet corner to corner."""
        square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        w = gjk_distance(PolytopeObstacle(square), PolytopeObstacle(square + 3.0))
        assert w.distance == pytest.approx(2 * np.sqrt(2.0), abs=1e-12)
        np.testing.assert_allclose(w.point_a, [1.0, 1.0], atol=1e-12)

    def test_support_examples(self):
        """Test support points for a square and a ball."""
        square = PolytopeObstacle([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        np.testing.assert_allclose(support_obstacle(square, [1.0, 2.0]), [1.0, 1.0])
        np.testing.assert_allclose(support_obstacle(BallObstacle([0.0, 0.0], 2.0), [0.0, -1.0]), [0.0, -2.0])

    def test_segment_against_point(self):
        """Test both bounds on a straight segment under a point."""
        line = BezierCurve([[0.0, 0.0], [1.0, 0.0]])
        seg = CurveSegment(line, line.domain)
        assert d_lb(seg, PointObstacle([0.5, 1.0])) == pytest.approx(1.0, abs=1e-12)
        w = d_ub(seg, PointObstacle([0.5, 1.0]))
        assert w.distance == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(w.point_a, [0.5, 0.0])
