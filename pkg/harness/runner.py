"""
Scene Runner
============
Loads scene files, runs their queries and assembles the report table.

Key Responsibility: Wraps the library modules (proximity_queries, scene_gen)
and exposes them through a small interface for the command line.
"""

import json
import logging
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Union

import pandas as pd
from pydantic import ValidationError

from convex_distance import ConvexObstacle, obstacle_to_dict
from curve_core import CurveSpec
from harness.schemas import BuiltScene, SceneMetadata, SceneModel, curve_model_from_spec
from proximity_queries import QueryConfig, QueryOutcome, QueryTask, run_batch

logger = logging.getLogger(__name__)

REPORT_COLUMNS = [
    "index", "kind", "subject", "target", "delta", "value",
    "lower", "upper", "iterations", "converged", "time_ns", "error",
]


class SceneFileError(ValueError):
    """A scene file failed to parse or validate; one message per problem."""

    def __init__(self, path: Union[str, Path], problems: List[str]):
        self.path = str(path)
        self.problems = problems
        super().__init__(f"{path}: " + "; ".join(problems))


def _validation_problems(exc: ValidationError) -> List[str]:
    problems = []
    for err in exc.errors():
        loc = ".".join(str(part) for part in err["loc"]) or "<root>"
        problems.append(f"{loc}: {err['msg']}")
    return problems


def parse_scene(text: str, source: Union[str, Path] = "<scene>") -> SceneModel:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneFileError(source, [f"line {exc.lineno}, column {exc.colno}: {exc.msg}"]) from exc
    try:
        return SceneModel.model_validate(data)
    except ValidationError as exc:
        raise SceneFileError(source, _validation_problems(exc)) from exc


def load_scene(path: Union[str, Path]) -> SceneModel:
    """Read and validate a scene JSON file."""
    return parse_scene(Path(path).read_text(), path)


def save_scene(
    curves: Dict[str, CurveSpec],
    obstacles: Dict[str, ConvexObstacle],
    path: Union[str, Path],
    queries: Optional[List[dict]] = None,
    generator: str = "SceneGenerator",
    seed: Optional[int] = None,
) -> SceneModel:
    """
    Write a scene file with a metadata block.

    Curves must use a built-in basis; Custom curves cannot be written and
    raise UnsupportedCapabilityError.
    """
    data = {
        "metadata": SceneMetadata(generator=generator, seed=seed).model_dump(),
        "curves": [curve_model_from_spec(name, c) for name, c in curves.items()],
        "obstacles": [{"name": name, **obstacle_to_dict(o)} for name, o in obstacles.items()],
        "queries": queries or [],
    }
    model = SceneModel.model_validate(data)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    # repr-precision floats: json writes the shortest round-trip form
    Path(path).write_text(json.dumps(data, indent=2) + "\n")
    return model


class SceneRunner:
    """
    Runs every query of a scene and keeps the outcomes.

    The scene's own epsilon, when given, overrides the configured one.
    """

    def __init__(self, config: Optional[QueryConfig] = None, jobs: int = 1):
        self.config = config or QueryConfig()
        self.jobs = jobs
        self.outcomes: List[QueryOutcome] = []

    def build(self, model: SceneModel) -> BuiltScene:
        scene = model.build()
        problems = scene.dimension_problems()
        if problems:
            raise SceneFileError("<scene>", problems)
        return scene

    def tasks(self, scene: BuiltScene) -> List[QueryTask]:
        cfg = self.config
        if scene.model.epsilon is not None:
            cfg = replace(cfg, epsilon=scene.model.epsilon)
        return [
            QueryTask(
                kind=q.kind,
                subject=scene.curves[q.subject],
                target=scene.target(q.target),
                delta=q.delta,
                config=cfg,
                label=f"{q.subject}->{q.target}",
            )
            for q in scene.model.queries
        ]

    def run(self, model: SceneModel) -> pd.DataFrame:
        scene = self.build(model)
        self.outcomes = run_batch(self.tasks(scene), self.jobs)
        rows = []
        for i, (q, outcome) in enumerate(zip(model.queries, self.outcomes)):
            result = outcome.result
            rows.append({
                "index": i,
                "kind": q.kind,
                "subject": q.subject,
                "target": q.target,
                "delta": q.delta,
                "value": outcome.value,
                "lower": None if result is None else result.lower,
                "upper": None if result is None else result.upper,
                "iterations": None if result is None else result.iterations,
                "converged": result is not None and result.converged,
                "time_ns": outcome.elapsed_ns,
                "error": outcome.error,
            })
        report = pd.DataFrame(rows, columns=REPORT_COLUMNS)
        unconverged = len(report) - int(report["converged"].astype(bool).sum())
        logger.info("ran %d queries, %d unconverged", len(report), unconverged)
        return report

    @property
    def all_converged(self) -> bool:
        return all(o.result is not None and o.result.converged for o in self.outcomes)


def run_scene(path: Union[str, Path], config: Optional[QueryConfig] = None,
              jobs: int = 1) -> pd.DataFrame:
    """Load a scene file and return its report table."""
    return SceneRunner(config, jobs).run(load_scene(path))
