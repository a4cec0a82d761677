"""
Benchmark Suites
================
Median and spread of wall time and iteration counts per instance.

Suites:
- arclength: closed-form arc-length bound vs quadrature arc length
- curve-point: Bezier curves of rising order against a point
- curve-polygon: heart, ranunculoid, Euler spiral and random quintics
  against convex polygons
- curve-curve: a Bezier pair, two circles, Lissajous vs fish and a circle
  involute pair

Iteration counts are the portable measure; times are machine-specific.
"""

import logging
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from convex_distance import PointObstacle
from curve_core import CurveSpec
from proximity_queries import (
    QueryConfig,
    collision_query,
    collision_query_curves,
    min_distance,
    min_distance_curves,
    tolerance_query,
    tolerance_query_curves,
)
from scene_gen import (
    SceneGenerator,
    circle_involute,
    cubic_power,
    ellipse,
    euler_spiral,
    fish,
    heart,
    lissajous,
    philox_rng,
    random_bezier,
    random_convex_polygon,
    ranunculoid,
    rational,
    translated,
    unit_circle,
)

logger = logging.getLogger(__name__)

BENCH_COLUMNS = [
    "suite", "instance", "algorithm",
    "median_time_ns", "std_time_ns", "median_iters", "std_iters",
]
SUITES = ("arclength", "curve-point", "curve-polygon", "curve-curve")
DEFAULT_SEED = 42

# algorithm labels
MINDIST = "min_distance"
TOLERANCE = "tolerance_verify"
COLLIDE = "collision_detect"
CLOSED_FORM = "closed_form_bound"
QUADRATURE = "quadrature_arc_length"


@dataclass
class BenchInstance:
    """One benchmark instance; each run returns its iteration count."""
    suite: str
    name: str
    runs: Dict[str, Callable[[], int]]


def _query_runs(subject: CurveSpec, target, cfg: QueryConfig, curves: bool) -> Dict[str, Callable[[], int]]:
    """Min distance, tolerance at half the min distance, and collision."""
    mindist, tolerance, collide = (
        (min_distance_curves, tolerance_query_curves, collision_query_curves) if curves
        else (min_distance, tolerance_query, collision_query)
    )
    d_min = mindist(subject, target, cfg).lower
    runs = {
        MINDIST: lambda: mindist(subject, target, cfg).iterations,
        COLLIDE: lambda: collide(subject, target, cfg).iterations,
    }
    if d_min > 0:
        runs[TOLERANCE] = lambda: tolerance(subject, target, d_min / 2, cfg).iterations
    return runs


def _arclength_runs(curve: CurveSpec, cfg: QueryConfig) -> Dict[str, Callable[[], int]]:
    def closed_form() -> int:
        curve.arc_length_upper_bound()
        return 0

    def quadrature() -> int:
        curve.arc_length(quadrature_cfg=cfg.quadrature)
        return 0

    return {CLOSED_FORM: closed_form, QUADRATURE: quadrature}


def _arclength_instances(cfg: QueryConfig) -> List[BenchInstance]:
    curves = (("ellipse", ellipse()), ("cubic", cubic_power()), ("rational", rational()))
    return [BenchInstance("arclength", name, _arclength_runs(c, cfg)) for name, c in curves]


def _curve_point_instances(cfg: QueryConfig, seed: int) -> List[BenchInstance]:
    rng = philox_rng(seed)
    target = PointObstacle([2.0, 0.5])
    instances = []
    for order in range(5, 46, 10):
        curve = random_bezier(order, ((-1.0, -1.0), (1.0, 1.0)), rng)
        instances.append(BenchInstance("curve-point", f"bezier{order}",
                                       _query_runs(curve, target, cfg, curves=False)))
    return instances


def _curve_polygon_instances(cfg: QueryConfig, seed: int) -> List[BenchInstance]:
    rng = philox_rng(seed)
    catalog = (
        ("heart", heart(), ((2.0, -1.0), (3.5, 1.0))),
        ("ranunculoid", ranunculoid(0.25), ((2.5, -1.0), (4.0, 1.0))),
        ("euler_spiral", euler_spiral(), ((2.0, -1.0), (3.5, 1.0))),
    )
    instances = [
        BenchInstance("curve-polygon", name,
                      _query_runs(curve, random_convex_polygon(6, box, rng), cfg, curves=False))
        for name, curve, box in catalog
    ]
    for i, (curve, polygon) in enumerate(SceneGenerator(seed).curve_polygon_instances(3)):
        instances.append(BenchInstance("curve-polygon", f"quintic{i}",
                                       _query_runs(curve, polygon, cfg, curves=False)))
    return instances


def _curve_curve_instances(cfg: QueryConfig, seed: int) -> List[BenchInstance]:
    a, b = SceneGenerator(seed).curve_curve_instances(1)[0]
    pairs = (
        ("bezier_pair", (a, b)),
        ("circle_pair", (unit_circle(), translated(unit_circle(), (4.0, 0.0)))),
        ("lissajous_fish", (lissajous(), translated(fish(), (3.0, 0.0)))),
        ("involute_pair", (circle_involute(), circle_involute(offset=(12.0, 0.0), rotation=np.pi))),
    )
    return [BenchInstance("curve-curve", name, _query_runs(*pair, cfg, curves=True))
            for name, pair in pairs]


def suite_instances(suite: str, cfg: QueryConfig = QueryConfig(), seed: int = DEFAULT_SEED) -> List[BenchInstance]:
    if suite == "arclength":
        return _arclength_instances(cfg)
    if suite == "curve-point":
        return _curve_point_instances(cfg, seed)
    if suite == "curve-polygon":
        return _curve_polygon_instances(cfg, seed)
    if suite == "curve-curve":
        return _curve_curve_instances(cfg, seed)
    raise ValueError(f"unknown bench suite {suite!r}; expected one of {SUITES}")


def run_bench(
    suite: str,
    repetitions: int = 11,
    cfg: QueryConfig = QueryConfig(),
    seed: int = DEFAULT_SEED,
    instances: Optional[Sequence[str]] = None,
    algorithms: Optional[Sequence[str]] = None,
) -> pd.DataFrame:
    """One row per (instance, algorithm) with median and std of time and iterations."""
    if repetitions < 1:
        raise ValueError(f"repetitions must be positive, got {repetitions}")
    samples = []
    for instance in suite_instances(suite, cfg, seed):
        if instances is not None and instance.name not in instances:
            continue
        for algorithm, run in instance.runs.items():
            if algorithms is not None and algorithm not in algorithms:
                continue
            for _ in range(repetitions):
                start = time.perf_counter_ns()
                iters = run()
                samples.append((instance.name, algorithm, time.perf_counter_ns() - start, iters))
            logger.debug("bench %s/%s/%s done", suite, instance.name, algorithm)

    raw = pd.DataFrame(samples, columns=["instance", "algorithm", "time_ns", "iters"])
    if raw.empty:
        return pd.DataFrame(columns=BENCH_COLUMNS)
    grouped = raw.groupby(["instance", "algorithm"], sort=False)
    table = grouped.agg(
        median_time_ns=("time_ns", "median"),
        std_time_ns=("time_ns", lambda s: float(np.std(s))),
        median_iters=("iters", "median"),
        std_iters=("iters", lambda s: float(np.std(s))),
    ).reset_index()
    table.insert(0, "suite", suite)
    return table[BENCH_COLUMNS]
