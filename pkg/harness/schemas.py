"""
Pydantic Schemas for Scene and Replan Files
===========================================
These models define the JSON contract of the command-line harness.
They mirror the curve and obstacle classes in curve_core.py,
convex_distance.py and hull_bounds.py, and build them on request.
"""

from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from convex_distance import BallObstacle, ConvexObstacle, PointObstacle, PolytopeObstacle
from curve_core import BezierCurve, CurveSpec, Interval, PowerCurve, TrigCurve, TrigTerm
from hull_bounds import SpheroidHull
from scene_gen import catalog_curve


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _check_vectors(vectors: List[List[float]], dimension: int, what: str) -> None:
    for i, v in enumerate(vectors):
        if len(v) != dimension:
            raise ValueError(f"{what}[{i}] has {len(v)} components, expected {dimension}")


# ============================================================================
# Curves
# ============================================================================

class _CurveBase(_Strict):
    name: str = Field(..., min_length=1)
    domain: Tuple[float, float] = (0.0, 1.0)

    @field_validator("domain")
    @classmethod
    def _positive_domain(cls, v: Tuple[float, float]) -> Tuple[float, float]:
        if not v[1] > v[0]:
            raise ValueError(f"domain must satisfy lo < hi, got {list(v)}")
        return v

    @property
    def interval(self) -> Interval:
        return Interval(*self.domain)


class BezierCurveModel(_CurveBase):
    """Bezier curve given by its control points."""
    basis: Literal["bezier"]
    dimension: int = Field(..., ge=1)
    control_points: List[List[float]] = Field(..., min_length=2)

    @model_validator(mode="after")
    def _dimensions(self):
        _check_vectors(self.control_points, self.dimension, "control_points")
        return self

    def build(self) -> CurveSpec:
        return BezierCurve(self.control_points, self.interval)


class PowerCurveModel(_CurveBase):
    """Polynomial curve, ascending coefficients per output dimension."""
    basis: Literal["power"]
    dimension: int = Field(..., ge=1)
    coefficients: List[List[float]]

    @model_validator(mode="after")
    def _dimensions(self):
        if len(self.coefficients) != self.dimension:
            raise ValueError(
                f"coefficients lists {len(self.coefficients)} dimensions, expected {self.dimension}"
            )
        return self

    def build(self) -> CurveSpec:
        return PowerCurve(self.coefficients, self.interval)


class TrigTermModel(_Strict):
    dim: int = Field(..., ge=0)
    amplitude_cos: float = 0.0
    amplitude_sin: float = 0.0
    frequency: float = 1.0
    phase: float = 0.0


class TrigCurveModel(_CurveBase):
    """Sum of sinusoids plus an affine [offset, slope] pair per dimension."""
    basis: Literal["trig"]
    dimension: int = Field(..., ge=1)
    terms: List[TrigTermModel] = Field(default_factory=list)
    affine: Optional[List[Tuple[float, float]]] = None

    @model_validator(mode="after")
    def _dimensions(self):
        for i, term in enumerate(self.terms):
            if term.dim >= self.dimension:
                raise ValueError(f"terms[{i}].dim = {term.dim} outside a {self.dimension}-D curve")
        if self.affine is not None and len(self.affine) != self.dimension:
            raise ValueError(f"affine lists {len(self.affine)} rows, expected {self.dimension}")
        return self

    def build(self) -> CurveSpec:
        terms = [TrigTerm(**t.model_dump()) for t in self.terms]
        return TrigCurve(self.dimension, terms, self.interval, self.affine)


class CatalogCurveModel(_Strict):
    """A named curve from the built-in catalog."""
    basis: Literal["catalog"]
    name: str = Field(..., min_length=1)
    catalog: str
    params: Dict[str, Any] = Field(default_factory=dict)

    def build(self) -> CurveSpec:
        return catalog_curve(self.catalog, **self.params)


CurveModel = Annotated[
    Union[BezierCurveModel, PowerCurveModel, TrigCurveModel, CatalogCurveModel],
    Field(discriminator="basis"),
]


def curve_model_from_spec(name: str, curve: CurveSpec) -> Dict[str, Any]:
    """JSON payload for a built-in-basis curve, tagged with a scene name."""
    return {"name": name, **curve.to_dict()}


# ============================================================================
# Obstacles
# ============================================================================

class PointModel(_Strict):
    type: Literal["point"]
    name: str = Field(..., min_length=1)
    p: List[float] = Field(..., min_length=1)

    @property
    def dimension(self) -> int:
        return len(self.p)

    def build(self) -> ConvexObstacle:
        return PointObstacle(self.p)


class PolytopeModel(_Strict):
    type: Literal["polytope"]
    name: str = Field(..., min_length=1)
    vertices: List[List[float]] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _dimensions(self):
        _check_vectors(self.vertices, len(self.vertices[0]), "vertices")
        return self

    @property
    def dimension(self) -> int:
        return len(self.vertices[0])

    def build(self) -> ConvexObstacle:
        return PolytopeObstacle(self.vertices)


class BallModel(_Strict):
    type: Literal["ball"]
    name: str = Field(..., min_length=1)
    center: List[float] = Field(..., min_length=1)
    radius: float = Field(..., ge=0)

    @property
    def dimension(self) -> int:
        return len(self.center)

    def build(self) -> ConvexObstacle:
        return BallObstacle(self.center, self.radius)


class SpheroidModel(_Strict):
    type: Literal["spheroid"]
    name: str = Field(..., min_length=1)
    focus_a: List[float] = Field(..., min_length=1)
    focus_b: List[float] = Field(..., min_length=1)
    major_length: float = Field(..., ge=0)

    @model_validator(mode="after")
    def _dimensions(self):
        if len(self.focus_a) != len(self.focus_b):
            raise ValueError("focus_a and focus_b differ in dimension")
        return self

    @property
    def dimension(self) -> int:
        return len(self.focus_a)

    def build(self) -> ConvexObstacle:
        return SpheroidHull(self.focus_a, self.focus_b, self.major_length)


ObstacleModel = Annotated[
    Union[PointModel, PolytopeModel, BallModel, SpheroidModel],
    Field(discriminator="type"),
]


# ============================================================================
# Scenes
# ============================================================================

class QueryModel(_Strict):
    kind: Literal["mindist", "tolerance", "collide"]
    subject: str
    target: str
    delta: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _delta_iff_tolerance(self):
        if (self.kind == "tolerance") != (self.delta is not None):
            raise ValueError("delta is required for tolerance queries and only for them")
        return self


class SceneMetadata(BaseModel):
    version: str = "1.0"
    generator: str = "manual"
    seed: Optional[int] = None


class SceneModel(_Strict):
    """A scene: named curves and obstacles plus the queries to run on them."""
    metadata: SceneMetadata = Field(default_factory=SceneMetadata)
    epsilon: Optional[float] = Field(default=None, gt=0)
    curves: List[CurveModel] = Field(default_factory=list)
    obstacles: List[ObstacleModel] = Field(default_factory=list)
    queries: List[QueryModel] = Field(default_factory=list)

    @model_validator(mode="after")
    def _names_resolve(self):
        curve_names = [c.name for c in self.curves]
        obstacle_names = [o.name for o in self.obstacles]
        names = curve_names + obstacle_names
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise ValueError(f"duplicate names: {duplicates}")
        for i, q in enumerate(self.queries):
            if q.subject not in curve_names:
                raise ValueError(f"queries[{i}].subject {q.subject!r} is not a curve")
            if q.target not in names:
                raise ValueError(f"queries[{i}].target {q.target!r} is not defined")
        return self

    def build(self) -> "BuiltScene":
        curves = {c.name: c.build() for c in self.curves}
        obstacles = {o.name: o.build() for o in self.obstacles}
        return BuiltScene(self, curves, obstacles)


class BuiltScene:
    """Scene with its curves and obstacles constructed."""

    def __init__(self, model: SceneModel, curves: Dict[str, CurveSpec],
                 obstacles: Dict[str, ConvexObstacle]):
        self.model = model
        self.curves = curves
        self.obstacles = obstacles

    def target(self, name: str) -> Union[CurveSpec, ConvexObstacle]:
        return self.curves[name] if name in self.curves else self.obstacles[name]

    def dimension_problems(self) -> List[str]:
        problems = []
        for i, q in enumerate(self.model.queries):
            a = self.curves[q.subject].dimension
            b = self.target(q.target).dimension
            if a != b:
                problems.append(f"queries[{i}]: {q.subject!r} is {a}-D but {q.target!r} is {b}-D")
        return problems


# ============================================================================
# Replanning
# ============================================================================

class ReplanSpec(_Strict):
    """Random-trajectory replanning setup."""
    start: List[float] = Field(..., min_length=1)
    goal: List[float] = Field(..., min_length=1)
    sample_count: int = Field(1000, ge=1)
    curve_order: int = Field(5, ge=1)
    box: Tuple[List[float], List[float]]
    seed: int = 42
    obstacles: List[ObstacleModel] = Field(default_factory=list)
    delta: float = Field(..., gt=0)

    @model_validator(mode="after")
    def _dimensions(self):
        d = len(self.start)
        if len(self.goal) != d or len(self.box[0]) != d or len(self.box[1]) != d:
            raise ValueError(f"start, goal and box corners must all be {d}-D")
        if any(lo > hi for lo, hi in zip(*self.box)):
            raise ValueError("box lower corner exceeds upper corner")
        for i, o in enumerate(self.obstacles):
            if o.dimension != d:
                raise ValueError(f"obstacles[{i}] is {o.dimension}-D, expected {d}-D")
        return self
