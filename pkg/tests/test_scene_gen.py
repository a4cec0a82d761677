"""
Test Suite for Scene Generator Module
=====================================
Tests the curve catalog and seeded random scenes including:
- Catalog curves match their closed forms
- Custom curves have consistent derivatives and antiderivatives
- Random shapes are reproducible and well formed
"""

import pickle

import pytest
import numpy as np
from scipy.integrate import trapezoid
from scipy.spatial import QhullError
from pathlib import Path
import sys

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from curve_core import CustomCurve
from scene_gen import (
    CATALOG,
    SceneGenerator,
    catalog_curve,
    circle_involute,
    euler_spiral,
    fish,
    heart,
    philox_rng,
    random_bezier,
    random_convex_polygon,
    translated,
)


def _finite_difference(curve, t, h=1e-6):
    return (curve.evaluate(t + h) - curve.evaluate(t - h)) / (2 * h)


class TestCatalog:
    """Tests for the named curves."""

    @pytest.mark.parametrize("name", sorted(CATALOG))
    def test_derivative_matches_positions(self, name):
        """Test every catalog curve's velocity against finite differences."""
        curve = catalog_curve(name)
        for t in np.linspace(curve.domain.lo, curve.domain.hi, 7)[1:-1]:
            np.testing.assert_allclose(curve.derivative(t), _finite_difference(curve, t), atol=1e-5)

    @pytest.mark.parametrize("name", sorted(CATALOG))
    def test_catalog_is_picklable(self, name):
        """Test catalog curves survive a trip to a worker process."""
        curve = catalog_curve(name)
        t = curve.domain.midpoint
        clone = pickle.loads(pickle.dumps(curve))
        np.testing.assert_allclose(clone.evaluate(t), curve.evaluate(t))

    def test_heart_closed_form(self):
        """Test the heart against its cubic-sine formula."""
        t = 0.7
        x = 16 * np.sin(t) ** 3
        y = 13 * np.cos(t) - 5 * np.cos(2 * t) - 2 * np.cos(3 * t) - np.cos(4 * t)
        np.testing.assert_allclose(heart(scale=1.0).evaluate(t), [x, y], atol=1e-12)

    def test_fish_closed_form(self):
        """Test the fish against its squared-sine formula."""
        t = 1.3
        expected = [np.cos(t) - np.sin(t) ** 2 / np.sqrt(2.0), np.cos(t) * np.sin(t)]
        np.testing.assert_allclose(fish().evaluate(t), expected, atol=1e-12)

    def test_euler_spiral_unit_speed(self):
        """Test the clothoid keeps unit speed."""
        spiral = euler_spiral()
        for t in (-5.0, -0.3, 0.0, 2.0):
            assert np.linalg.norm(spiral.derivative(t)) == pytest.approx(1.0)
        np.testing.assert_allclose(spiral.evaluate(0.0), [0.0, 0.0], atol=1e-15)

    def test_involute_rigid_motion(self):
        """Test rotation by pi then offset maps the involute point-wise."""
        base = circle_involute()
        moved = circle_involute(offset=(12.0, 0.0), rotation=np.pi)
        t = 2.0
        np.testing.assert_allclose(moved.evaluate(t), [12.0, 0.0] - base.evaluate(t), atol=1e-12)

    def test_custom_antiderivatives(self):
        """Test closed-form antiderivatives against quadrature."""
        for name in ("rational", "euler_spiral", "circle_involute"):
            curve = catalog_curve(name)
            assert isinstance(curve, CustomCurve)
            assert curve.has_antiderivative
            exact = curve.speed_squared_integral()
            ts = np.linspace(curve.domain.lo, curve.domain.hi, 20001)
            speeds = np.sum(curve.derivative_many(ts) ** 2, axis=1)
            assert exact == pytest.approx(trapezoid(speeds, ts), rel=1e-6)

    def test_unknown_name(self):
        """Test an unknown catalog name is refused."""
        with pytest.raises(ValueError, match="unknown catalog curve"):
            catalog_curve("spirograph")

    def test_parameters_pass_through(self):
        """Test factory keyword arguments reach the curve."""
        small, large = catalog_curve("heart", scale=0.1), catalog_curve("heart", scale=1.0)
        np.testing.assert_allclose(10 * small.evaluate(1.0), large.evaluate(1.0))

    def test_translated_moves_trace(self):
        """Test a translated trig curve is the original shifted."""
        moved = translated(fish(), (3.0, -1.0))
        for t in (0.0, 1.3, 4.0):
            np.testing.assert_allclose(moved.evaluate(t), fish().evaluate(t) + [3.0, -1.0])
        assert moved.arc_length_upper_bound() == pytest.approx(fish().arc_length_upper_bound())


class TestRandomShapes:
    """Tests for random_bezier and random_convex_polygon."""

    def test_philox_reproducible(self):
        """Test equal seeds give equal streams."""
        np.testing.assert_array_equal(philox_rng(7).uniform(size=5), philox_rng(7).uniform(size=5))

    def test_bezier_in_box(self):
        """Test control points respect the box and pinned ends."""
        rng = philox_rng(1)
        curve = random_bezier(5, ((0.0, -5.0), (10.0, 5.0)), rng, start=[0.0, 0.0], goal=[10.0, 0.0])
        assert curve.order == 5
        np.testing.assert_allclose(curve.control_points[0], [0.0, 0.0])
        np.testing.assert_allclose(curve.control_points[-1], [10.0, 0.0])
        assert np.all(curve.control_points[:, 1] >= -5.0) and np.all(curve.control_points[:, 1] <= 5.0)

    def test_polygon_is_convex(self):
        """Test polygon vertices turn the same way."""
        rng = philox_rng(2)
        for _ in range(20):
            V = random_convex_polygon(8, ((0.0, 0.0), (1.0, 1.0)), rng).vertices
            edges = np.roll(V, -1, axis=0) - V
            turns = edges[:, 0] * np.roll(edges, -1, axis=0)[:, 1] - edges[:, 1] * np.roll(edges, -1, axis=0)[:, 0]
            assert np.all(turns > 0)

    def test_polygon_retries_only_qhull_errors(self, monkeypatch):
        """Test a degenerate draw is redrawn while other errors propagate."""
        import scene_gen
        real = scene_gen.ConvexHull
        calls = []

        def flaky(points):
            calls.append(points)
            if len(calls) == 1:
                raise QhullError("QH6154 initial simplex is flat")
            return real(points)

        monkeypatch.setattr(scene_gen, "ConvexHull", flaky)
        polygon = random_convex_polygon(5, ((0.0, 0.0), (1.0, 1.0)), philox_rng(8))
        assert len(calls) == 2
        assert polygon.vertices.shape[1] == 2

        def broken(points):
            raise MemoryError("out of memory")

        monkeypatch.setattr(scene_gen, "ConvexHull", broken)
        with pytest.raises(MemoryError):
            random_convex_polygon(5, ((0.0, 0.0), (1.0, 1.0)), philox_rng(8))

    def test_bad_arguments(self):
        """Test degenerate requests are refused."""
        rng = philox_rng(3)
        with pytest.raises(ValueError):
            random_bezier(0, ((0.0, 0.0), (1.0, 1.0)), rng)
        with pytest.raises(ValueError):
            random_convex_polygon(2, ((0.0, 0.0), (1.0, 1.0)), rng)
        with pytest.raises(ValueError):
            random_convex_polygon(4, ((0.0, 0.0, 0.0), (1.0, 1.0, 1.0)), rng)
        with pytest.raises(ValueError):
            random_bezier(3, ((1.0, 1.0), (0.0, 0.0)), rng)


class TestSceneGenerator:
    """Tests for SceneGenerator instance sets."""

    def test_same_seed_same_instances(self):
        """Test instance sets are reproducible."""
        first = SceneGenerator(11).curve_polygon_instances(3)
        second = SceneGenerator(11).curve_polygon_instances(3)
        for (c1, o1), (c2, o2) in zip(first, second):
            np.testing.assert_array_equal(c1.control_points, c2.control_points)
            np.testing.assert_array_equal(o1.vertices, o2.vertices)

    def test_different_seeds_differ(self):
        """Test seeds change the draws."""
        a = SceneGenerator(1).replan_curves(1, [0.0, 0.0], [1.0, 0.0])[0]
        b = SceneGenerator(2).replan_curves(1, [0.0, 0.0], [1.0, 0.0])[0]
        assert not np.allclose(a.control_points, b.control_points)

    def test_curve_pair_shift(self):
        """Test the second curve of a pair comes from the shifted box."""
        for a, b in SceneGenerator(4).curve_curve_instances(5, shift=(2.5, 0.0)):
            assert np.all(a.control_points[:, 0] <= 1.0)
            assert np.all(b.control_points[:, 0] >= 1.5)

    def test_replan_endpoints(self):
        """Test every trajectory runs from start to goal."""
        curves = SceneGenerator(42, box=((0.0, -5.0), (10.0, 5.0))).replan_curves(10, [0.0, 0.0], [10.0, 0.0])
        for curve in curves:
            np.testing.assert_allclose(curve.evaluate(0.0), [0.0, 0.0])
            np.testing.assert_allclose(curve.evaluate(1.0), [10.0, 0.0])
