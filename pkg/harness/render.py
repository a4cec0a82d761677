"""
SVG Rendering
=============
Static, byte-reproducible pictures of scenes, query witnesses and
replanning results. Curves in more than two dimensions are drawn by their
first two coordinates, and 1-D scenes along the x axis.
"""

import logging
from pathlib import Path
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.patches import Circle, Ellipse, Polygon  # noqa: E402

from convex_distance import BallObstacle, ConvexObstacle, PointObstacle, PolytopeObstacle  # noqa: E402
from curve_core import CurveSpec  # noqa: E402
from hull_bounds import SpheroidHull  # noqa: E402

logger = logging.getLogger(__name__)

CURVE_SAMPLES = 512
SVG_SALT = "curve-proximity"
CLASS_COLORS = {"feasible": "tab:blue", "unsafe": "tab:red", "colliding": "0.6"}

Witness = Tuple[np.ndarray, np.ndarray]


def _xy(points) -> np.ndarray:
    """Rows of planar coordinates; 1-D points sit on the x axis."""
    xy = np.atleast_2d(np.asarray(points, dtype=float))[:, :2]
    if xy.shape[1] == 1:
        xy = np.hstack([xy, np.zeros_like(xy)])
    return xy


def curve_polyline(curve: CurveSpec, samples: int = CURVE_SAMPLES) -> np.ndarray:
    ts = np.linspace(curve.domain.lo, curve.domain.hi, samples)
    return _xy(curve.evaluate_many(ts))


def _polygon_outline(vertices: np.ndarray) -> np.ndarray:
    """Planar vertices ordered counter-clockwise about their mean."""
    xy = _xy(vertices)
    center = xy.mean(axis=0)
    order = np.argsort(np.arctan2(xy[:, 1] - center[1], xy[:, 0] - center[0]), kind="stable")
    return xy[order]


def _hull_patch(h: SpheroidHull, **style) -> Ellipse:
    axis = h.axis
    angle = float(np.degrees(np.arctan2(axis[1], axis[0]))) if h.dimension > 1 else 0.0
    return Ellipse(tuple(_xy(h.center)[0]), 2 * h.semi_major, 2 * h.semi_minor, angle=angle, **style)


def _draw_obstacle(ax, o: ConvexObstacle, label: Optional[str] = None) -> None:
    style = dict(facecolor="0.85", edgecolor="black", linewidth=0.8)
    if isinstance(o, PointObstacle):
        xy = _xy(o.p)[0]
        ax.plot([xy[0]], [xy[1]], marker="o", color="black", markersize=3)
    elif isinstance(o, PolytopeObstacle):
        outline = _polygon_outline(o.vertices)
        if len(outline) >= 3:
            ax.add_patch(Polygon(outline, closed=True, **style))
        else:
            ax.plot(outline[:, 0], outline[:, 1], color="black", linewidth=1.5)
    elif isinstance(o, BallObstacle):
        ax.add_patch(Circle(tuple(_xy(o.ball_center)[0]), o.radius, **style))
    elif isinstance(o, SpheroidHull):
        ax.add_patch(_hull_patch(o, **style))
    else:
        raise TypeError(f"cannot draw obstacle of type {type(o).__name__}")
    if label:
        center = _xy(o.center)[0]
        ax.annotate(label, tuple(center), fontsize=6, ha="center", va="center")


def _figure():
    plt.rcParams["svg.hashsalt"] = SVG_SALT
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.set_aspect("equal", adjustable="datalim")
    ax.grid(True, linewidth=0.3)
    return fig, ax


def _save(fig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.debug("wrote %s", path)
    return path


def render_svg(
    curves: Mapping[str, CurveSpec],
    obstacles: Mapping[str, ConvexObstacle],
    path: Union[str, Path],
    witnesses: Sequence[Witness] = (),
    hulls: Iterable[SpheroidHull] = (),
    colors: Optional[Dict[str, str]] = None,
) -> Path:
    """Draw curves, obstacles, dashed witness segments and optional hull ellipses."""
    fig, ax = _figure()
    for name, o in obstacles.items():
        _draw_obstacle(ax, o, name)
    for h in hulls:
        ax.add_patch(_hull_patch(h, fill=False, edgecolor="tab:green", linewidth=0.5))
    for name, curve in curves.items():
        xy = curve_polyline(curve)
        ax.plot(xy[:, 0], xy[:, 1], linewidth=1.0,
                color=(colors or {}).get(name, "tab:blue"), label=name)
    for a, b in witnesses:
        seg = _xy([a, b])
        ax.plot(seg[:, 0], seg[:, 1], linestyle="--", color="tab:orange", linewidth=0.8)
    if curves:
        ax.legend(fontsize=6, loc="upper right")
    ax.autoscale_view()
    return _save(fig, path)


def render_replan(curves: Sequence[CurveSpec], labels: Sequence[str],
                  obstacles: Sequence[ConvexObstacle], path: Union[str, Path]) -> Path:
    """Trajectories colored by class over the obstacles."""
    fig, ax = _figure()
    for o in obstacles:
        _draw_obstacle(ax, o)
    # feasible last so it stays on top
    for cls in ("colliding", "unsafe", "feasible"):
        for curve, label in zip(curves, labels):
            if label == cls:
                xy = curve_polyline(curve, 128)
                ax.plot(xy[:, 0], xy[:, 1], color=CLASS_COLORS[cls], linewidth=0.4)
    ax.autoscale_view()
    return _save(fig, path)
