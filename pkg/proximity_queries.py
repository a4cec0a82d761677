"""
Proximity Queries Module
========================
Interval branch-and-bound over the curve parameter domain.

Queries:
1. Minimum separating distance, curve vs obstacle and curve vs curve
2. Tolerance verification: is the distance greater than delta?
3. Collision detection: the delta = 0 case, answered at resolution epsilon

All four share one best-first loop. A min-heap keyed by node lower bound
(FIFO among ties) holds the unfathomed cover of the domain; the global lower
bound is the heap top and the global upper bound the best realized distance
ever seen (node midpoints, and the domain endpoints of closed intervals).
Nodes that cannot beat the upper bound by more than epsilon are dropped.
The predicates stop as soon as the bounds decide them.
"""

import heapq
import itertools
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from convex_distance import (
    GJK_MAX_ITERATIONS,
    GJK_TOLERANCE,
    ConvexObstacle,
    DistanceWitness,
    d_lb,
    d_lb_curves,
    d_point,
    d_ub,
    d_ub_curves,
)
from curve_core import (
    DEFAULT_QUADRATURE,
    CurveSegment,
    CurveSpec,
    Interval,
    QuadratureConfig,
    Tolerances,
)
from errors import DegenerateIntervalError, DimensionMismatchError, IndeterminateError
from hull_bounds import SpheroidHull, hull

logger = logging.getLogger(__name__)

# heap size at which queued nodes are re-checked against a moved upper bound
SWEEP_MIN_HEAP = 4096


@dataclass(frozen=True)
class QueryConfig:
    """Solver settings; the defaults follow epsilon = 1e-10."""
    epsilon: float = 1e-10
    max_iterations: int = 1_000_000
    record_trace: bool = False
    gjk_tolerance: float = GJK_TOLERANCE
    gjk_max_iterations: int = GJK_MAX_ITERATIONS
    quadrature: QuadratureConfig = DEFAULT_QUADRATURE

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if int(self.max_iterations) < 1:
            raise ValueError(f"max_iterations must be positive, got {self.max_iterations}")


DEFAULT_CONFIG = QueryConfig()


@dataclass
class QueryNode:
    """One element of the open cover: interval(s), bounds and cached hulls."""
    intervals: Tuple[Interval, ...]
    lb: float
    ub: float
    hulls: Tuple[SpheroidHull, ...]
    witness: DistanceWitness


@dataclass
class QueryResult:
    """Certified bounds on the separating distance plus how they were found."""
    lower: float
    upper: float
    witness_params: Tuple[float, ...]
    witness_points: Tuple[np.ndarray, np.ndarray]
    iterations: int
    converged: bool
    trace: Optional[List[Tuple[int, float, float]]] = None
    decision: Optional[bool] = None
    floor_hits: int = 0
    nodes_open: int = 0
    nodes_pruned: int = 0

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    def to_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "gap": self.gap,
            "witness_params": list(self.witness_params),
            "witness_points": [p.tolist() for p in self.witness_points],
            "iterations": self.iterations,
            "converged": self.converged,
            "decision": self.decision,
            "floor_hits": self.floor_hits,
            "nodes_open": self.nodes_open,
            "nodes_pruned": self.nodes_pruned,
        }


# ============================================================================
# Problems: how to bound and split a node
# ============================================================================

def _splittable(Q: Interval, domain: Interval) -> bool:
    return Q.length >= Tolerances.REFINEMENT_FLOOR * np.finfo(float).eps * domain.length


class _CurveObstacleProblem:
    """Nodes are single intervals of one curve against a fixed obstacle."""

    def __init__(self, curve: CurveSpec, obstacle: ConvexObstacle, cfg: QueryConfig):
        if curve.dimension != obstacle.dimension:
            raise DimensionMismatchError(
                f"{curve.dimension}-D curve queried against {obstacle.dimension}-D obstacle"
            )
        self.curve = curve
        self.obstacle = obstacle
        self.cfg = cfg
        dom = curve.domain
        self._ends = [
            (t, d_point(curve.evaluate(t), obstacle, cfg.gjk_tolerance, cfg.gjk_max_iterations))
            for t in sorted({dom.lo, dom.hi})
        ]

    def node(self, Q: Interval) -> QueryNode:
        segment = CurveSegment(self.curve, Q)
        h = hull(segment, self.cfg.quadrature)
        lb = d_lb(segment, self.obstacle, h, self.cfg.gjk_tolerance, self.cfg.gjk_max_iterations)
        witness = d_ub(segment, self.obstacle, self.cfg.gjk_tolerance, self.cfg.gjk_max_iterations)
        return QueryNode((Q,), min(lb, witness.distance), witness.distance, (h,), witness)

    def root(self) -> QueryNode:
        return self.node(self.curve.domain)

    def can_split(self, node: QueryNode) -> bool:
        return _splittable(node.intervals[0], self.curve.domain)

    def split(self, node: QueryNode) -> List[QueryNode]:
        left, right = node.intervals[0].bisect()
        return [self.node(left), self.node(right)]

    def witness_params(self, node: QueryNode) -> Tuple[float, ...]:
        return (node.intervals[0].midpoint,)

    def boundary_witnesses(self, node: QueryNode) -> List[Tuple[Tuple[float, ...], DistanceWitness]]:
        """Realized distances at the domain endpoints that close this node's interval."""
        Q = node.intervals[0]
        return [((t,), w) for t, w in self._ends if t in (Q.lo, Q.hi)]


class _CurveCurveProblem:
    """Nodes are interval pairs; only the longer interval is bisected."""

    def __init__(self, a: CurveSpec, b: CurveSpec, cfg: QueryConfig):
        if a.dimension != b.dimension:
            raise DimensionMismatchError(
                f"{a.dimension}-D curve queried against {b.dimension}-D curve"
            )
        self.curves = (a, b)
        self.cfg = cfg
        self._ends = tuple(
            [(t, c.evaluate(t)) for t in sorted({c.domain.lo, c.domain.hi})] for c in self.curves
        )

    def _hull(self, which: int, Q: Interval) -> SpheroidHull:
        return hull(CurveSegment(self.curves[which], Q), self.cfg.quadrature)

    def node(self, Q: Interval, R: Interval,
             hull_q: Optional[SpheroidHull] = None,
             hull_r: Optional[SpheroidHull] = None) -> QueryNode:
        seg_q = CurveSegment(self.curves[0], Q)
        seg_r = CurveSegment(self.curves[1], R)
        hull_q = hull_q if hull_q is not None else self._hull(0, Q)
        hull_r = hull_r if hull_r is not None else self._hull(1, R)
        lb = d_lb_curves(seg_q, seg_r, hull_q, hull_r,
                         self.cfg.gjk_tolerance, self.cfg.gjk_max_iterations)
        witness = d_ub_curves(seg_q, seg_r)
        return QueryNode((Q, R), min(lb, witness.distance), witness.distance,
                         (hull_q, hull_r), witness)

    def root(self) -> QueryNode:
        return self.node(self.curves[0].domain, self.curves[1].domain)

    def _split_choice(self, node: QueryNode) -> Optional[int]:
        Q, R = node.intervals
        q_ok = _splittable(Q, self.curves[0].domain)
        r_ok = _splittable(R, self.curves[1].domain)
        if q_ok and (not r_ok or Q.length >= R.length):
            return 0
        if r_ok:
            return 1
        return None

    def can_split(self, node: QueryNode) -> bool:
        return self._split_choice(node) is not None

    def split(self, node: QueryNode) -> List[QueryNode]:
        Q, R = node.intervals
        hull_q, hull_r = node.hulls
        if self._split_choice(node) == 0:
            return [self.node(half, R, hull_r=hull_r) for half in Q.bisect()]
        return [self.node(Q, half, hull_q=hull_q) for half in R.bisect()]

    def witness_params(self, node: QueryNode) -> Tuple[float, ...]:
        return tuple(I.midpoint for I in node.intervals)

    def boundary_witnesses(self, node: QueryNode) -> List[Tuple[Tuple[float, ...], DistanceWitness]]:
        """
        Realized distances pairing a domain endpoint of one curve with the
        other interval's midpoint image, plus the endpoint-endpoint corners.
        """
        Q, R = node.intervals
        x_mid, y_mid = node.witness.point_a, node.witness.point_b
        ends_q = [(s, x) for s, x in self._ends[0] if s in (Q.lo, Q.hi)]
        ends_r = [(t, y) for t, y in self._ends[1] if t in (R.lo, R.hi)]
        pairs = [((s, R.midpoint), x, y_mid) for s, x in ends_q]
        pairs += [((Q.midpoint, t), x_mid, y) for t, y in ends_r]
        pairs += [((s, t), x, y) for s, x in ends_q for t, y in ends_r]
        return [(params, DistanceWitness(float(np.linalg.norm(x - y)), x, y))
                for params, x, y in pairs]


# ============================================================================
# The branch-and-bound loop
# ============================================================================

def _search(problem, cfg: QueryConfig, delta: Optional[float] = None) -> QueryResult:
    """
    Best-first refinement.

    With delta None the loop runs until upper - lower <= epsilon. With a
    delta it runs while upper - delta > epsilon and decides True the moment
    lower > delta; falling out of the loop decides False.

    A node whose lb is already within epsilon of the upper bound can never
    be popped before the loop stops, so it is dropped instead of queued.
    The smallest dropped lb stays part of the lower bound.
    """
    counter = itertools.count()
    root = problem.root()
    heap = [(root.lb, next(counter), root)]
    upper = root.ub
    best_params = problem.witness_params(root)
    best_witness = root.witness
    pruned_floor = np.inf
    nodes_pruned = 0
    sweep_size = SWEEP_MIN_HEAP
    iterations = 0
    floor_hits = 0
    decision: Optional[bool] = None
    converged = True

    def offer(params: Tuple[float, ...], witness: DistanceWitness) -> None:
        nonlocal upper, best_params, best_witness
        if witness.distance < upper:
            upper = witness.distance
            best_params, best_witness = params, witness

    def prune(lb: float) -> None:
        nonlocal pruned_floor, nodes_pruned
        pruned_floor = min(pruned_floor, lb)
        nodes_pruned += 1

    for params, witness in problem.boundary_witnesses(root):
        offer(params, witness)
    lower = min(root.lb, upper)
    trace = [(0, lower, upper)] if cfg.record_trace else None

    def keep_going() -> bool:
        if delta is None:
            return upper - lower > cfg.epsilon
        return upper - delta > cfg.epsilon

    while keep_going():
        if delta is not None and lower > delta:
            decision = True
            break
        if iterations >= cfg.max_iterations:
            converged = False
            break

        _, _, node = heapq.heappop(heap)
        iterations += 1
        children: List[QueryNode] = []
        if problem.can_split(node):
            try:
                children = problem.split(node)
            except DegenerateIntervalError:
                children = []
        if children:
            for child in children:
                # the parent's bound covers the child's interval too
                child.lb = max(child.lb, node.lb)
                offer(problem.witness_params(child), child.witness)
                for params, witness in problem.boundary_witnesses(child):
                    offer(params, witness)
            for child in children:
                if child.lb >= upper - cfg.epsilon:
                    prune(child.lb)
                else:
                    heapq.heappush(heap, (child.lb, next(counter), child))
        else:
            # resolution limit: the node's midpoint value stands for the node
            floor_hits += 1
            prune(node.ub)

        if len(heap) >= 2 * sweep_size:
            # upper has moved since these were queued
            kept = [entry for entry in heap if entry[0] < upper - cfg.epsilon]
            for entry in heap:
                if entry[0] >= upper - cfg.epsilon:
                    prune(entry[0])
            heap = kept
            heapq.heapify(heap)
            sweep_size = max(SWEEP_MIN_HEAP, len(heap))

        lower = min(heap[0][0] if heap else np.inf, pruned_floor, upper)
        if trace is not None:
            trace.append((iterations, lower, upper))

    if delta is not None and decision is None and converged:
        decision = False
    if floor_hits:
        logger.debug("%d node(s) reached the refinement floor", floor_hits)

    return QueryResult(
        lower=float(lower),
        upper=float(upper),
        witness_params=tuple(float(t) for t in best_params),
        witness_points=(best_witness.point_a, best_witness.point_b),
        iterations=iterations,
        converged=converged,
        trace=trace,
        decision=decision,
        floor_hits=floor_hits,
        nodes_open=len(heap),
        nodes_pruned=nodes_pruned,
    )


def _problem(subject: CurveSpec, target, cfg: QueryConfig):
    if isinstance(target, CurveSpec):
        return _CurveCurveProblem(subject, target, cfg)
    return _CurveObstacleProblem(subject, target, cfg)


def _min_distance(subject: CurveSpec, target, cfg: QueryConfig) -> QueryResult:
    result = _search(_problem(subject, target, cfg), cfg)
    if not result.converged:
        logger.warning(
            "minimum distance not converged after %d iterations: [%.17g, %.17g] (gap %.3g)",
            result.iterations, result.lower, result.upper, result.gap,
        )
    return result


def _predicate_query(subject: CurveSpec, target, delta: float, cfg: QueryConfig) -> QueryResult:
    result = _search(_problem(subject, target, cfg), cfg, delta)
    if result.decision is None:
        raise IndeterminateError(result.lower, result.upper, result.iterations,
                                 delta if delta > 0 else None)
    return result


def _check_delta(delta: float) -> float:
    delta = float(delta)
    if not delta > 0:
        raise ValueError(f"tolerance delta must be positive, got {delta}")
    return delta


# ============================================================================
# Public queries
# ============================================================================

def min_distance(curve: CurveSpec, o: ConvexObstacle,
                 cfg: QueryConfig = DEFAULT_CONFIG) -> QueryResult:
    """Epsilon-suboptimal minimum distance between a curve and an obstacle."""
    return _min_distance(curve, o, cfg)


def min_distance_curves(a: CurveSpec, b: CurveSpec,
                        cfg: QueryConfig = DEFAULT_CONFIG) -> QueryResult:
    """Epsilon-suboptimal minimum distance between two curves."""
    return _min_distance(a, b, cfg)


def tolerance_query(curve: CurveSpec, o: ConvexObstacle, delta: float,
                    cfg: QueryConfig = DEFAULT_CONFIG) -> QueryResult:
    """Tolerance verification with its bounds and iteration count."""
    return _predicate_query(curve, o, _check_delta(delta), cfg)


def tolerance_verify(curve: CurveSpec, o: ConvexObstacle, delta: float,
                     cfg: QueryConfig = DEFAULT_CONFIG) -> bool:
    """True iff the curve stays farther than delta from the obstacle."""
    return bool(tolerance_query(curve, o, delta, cfg).decision)


def collision_query(curve: CurveSpec, o: ConvexObstacle,
                    cfg: QueryConfig = DEFAULT_CONFIG) -> QueryResult:
    """Collision detection; `decision` is True when the shapes intersect."""
    result = _predicate_query(curve, o, 0.0, cfg)
    result.decision = not result.decision
    return result


def collision_detect(curve: CurveSpec, o: ConvexObstacle,
                     cfg: QueryConfig = DEFAULT_CONFIG) -> bool:
    return bool(collision_query(curve, o, cfg).decision)


def tolerance_query_curves(a: CurveSpec, b: CurveSpec, delta: float,
                           cfg: QueryConfig = DEFAULT_CONFIG) -> QueryResult:
    return _predicate_query(a, b, _check_delta(delta), cfg)


def tolerance_verify_curves(a: CurveSpec, b: CurveSpec, delta: float,
                            cfg: QueryConfig = DEFAULT_CONFIG) -> bool:
    return bool(tolerance_query_curves(a, b, delta, cfg).decision)


def collision_query_curves(a: CurveSpec, b: CurveSpec,
                           cfg: QueryConfig = DEFAULT_CONFIG) -> QueryResult:
    result = _predicate_query(a, b, 0.0, cfg)
    result.decision = not result.decision
    return result


def collision_detect_curves(a: CurveSpec, b: CurveSpec,
                            cfg: QueryConfig = DEFAULT_CONFIG) -> bool:
    return bool(collision_query_curves(a, b, cfg).decision)


# ============================================================================
# Batch execution
# ============================================================================

QUERY_KINDS = ("mindist", "tolerance", "collide")


@dataclass(frozen=True)
class QueryTask:
    """An independent query; subject is a curve, target a curve or obstacle."""
    kind: str
    subject: CurveSpec
    target: Union[CurveSpec, ConvexObstacle]
    delta: Optional[float] = None
    config: QueryConfig = field(default_factory=QueryConfig)
    label: str = ""

    def __post_init__(self):
        if self.kind not in QUERY_KINDS:
            raise ValueError(f"unknown query kind {self.kind!r}; expected one of {QUERY_KINDS}")
        if (self.kind == "tolerance") != (self.delta is not None):
            raise ValueError("delta is required for tolerance queries and only for them")


@dataclass
class QueryOutcome:
    """Result of one batch task; `error` is set instead of raising."""
    label: str
    kind: str
    result: Optional[QueryResult]
    elapsed_ns: int
    error: Optional[str] = None

    @property
    def value(self) -> Union[bool, float, None]:
        if self.result is None:
            return None
        if self.kind == "mindist":
            return self.result.lower
        return self.result.decision


def run_query(task: QueryTask) -> QueryOutcome:
    start = time.perf_counter_ns()
    try:
        if task.kind == "mindist":
            result = _min_distance(task.subject, task.target, task.config)
        elif task.kind == "tolerance":
            result = _predicate_query(task.subject, task.target,
                                      _check_delta(task.delta), task.config)
        else:
            result = _predicate_query(task.subject, task.target, 0.0, task.config)
            result.decision = not result.decision
    except IndeterminateError as exc:
        return QueryOutcome(task.label, task.kind, None,
                            time.perf_counter_ns() - start, str(exc))
    return QueryOutcome(task.label, task.kind, result, time.perf_counter_ns() - start)


def run_batch(tasks: Sequence[QueryTask], jobs: int = 1) -> List[QueryOutcome]:
    """Run independent tasks, optionally across processes; output keeps task order."""
    if jobs <= 1 or len(tasks) <= 1:
        return [run_query(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_query, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
