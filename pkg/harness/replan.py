"""
Trajectory Replanning Demo
==========================
Samples random Bezier trajectories between two poses and sorts them into
colliding, unsafe (collision-free but closer than delta) and feasible.

Undecided predicate queries count against the trajectory: an indeterminate
collision check makes it colliding, an indeterminate tolerance check unsafe.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Dict, List, Sequence

from convex_distance import ConvexObstacle
from curve_core import BezierCurve, CurveSpec
from errors import IndeterminateError
from harness.schemas import ReplanSpec
from proximity_queries import QueryConfig, collision_detect, tolerance_verify
from scene_gen import SceneGenerator

logger = logging.getLogger(__name__)

COLLIDING = "colliding"
UNSAFE = "unsafe"
FEASIBLE = "feasible"
CLASSES = (COLLIDING, UNSAFE, FEASIBLE)


def classify_trajectory(curve: CurveSpec, obstacles: Sequence[ConvexObstacle], delta: float,
                        cfg: QueryConfig = QueryConfig()) -> str:
    """Class of one trajectory; obstacles are checked for collision before tolerance."""
    for o in obstacles:
        try:
            if collision_detect(curve, o, cfg):
                return COLLIDING
        except IndeterminateError:
            logger.debug("collision check undecided; counted as colliding")
            return COLLIDING
    for o in obstacles:
        try:
            if not tolerance_verify(curve, o, delta, cfg):
                return UNSAFE
        except IndeterminateError:
            logger.debug("tolerance check undecided; counted as unsafe")
            return UNSAFE
    return FEASIBLE


@dataclass
class ReplanSummary:
    """Per-class counts plus the sampled curves and their labels, in sample order."""
    curves: List[BezierCurve]
    labels: List[str]
    counts: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        self.counts = {c: self.labels.count(c) for c in CLASSES}

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def to_dict(self) -> dict:
        return {"total": self.total, **self.counts}


def sample_trajectories(spec: ReplanSpec) -> List[BezierCurve]:
    generator = SceneGenerator(seed=spec.seed, box=(spec.box[0], spec.box[1]))
    return generator.replan_curves(spec.sample_count, spec.start, spec.goal, spec.curve_order)


def run_replan(spec: ReplanSpec, cfg: QueryConfig = QueryConfig(), jobs: int = 1) -> ReplanSummary:
    """Sample, classify and count; deterministic for a fixed seed at any job count."""
    curves = sample_trajectories(spec)
    obstacles = [o.build() for o in spec.obstacles]
    classify = partial(classify_trajectory, obstacles=obstacles, delta=spec.delta, cfg=cfg)
    if jobs > 1 and len(curves) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            labels = list(pool.map(classify, curves, chunksize=max(1, len(curves) // (4 * jobs))))
    else:
        labels = [classify(c) for c in curves]
    summary = ReplanSummary(curves, labels)
    logger.info("replan: %s", summary.to_dict())
    return summary
